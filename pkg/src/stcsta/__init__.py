"""Correlation-driven sampling-rate scheduling for cluster-based sensor
networks, with energy accounting and LDS-based reconstruction of
non-sampled measurements."""

from .core import (
    ALL_FEATURES,
    CorrelationRow,
    CorrelationTable,
    EnergyParams,
    Feature,
    ReadingMatrix,
    RoundConfig,
    SamplingSchedule,
    StreamId,
    slots_for_reduction,
    validate_matrix,
)
from .energy import ActivityCounters, EnergyReport, ch_memory_bytes, node_energy, radio_tx_energy
from .ingest import RawDataset, decimate, load_dataset, to_reading_matrix
from .metrics import correlation_census, quality, traffic_pcts
from .reconstruct import EmOptions, LdsModel, reconstruct
from .scheduler import (
    OccurrenceOrder,
    allocate_reductions,
    best_match_table,
    correlation_matrix,
    exaggerated_allocate,
    forward_fill,
    occurrence_order,
    pearson,
)
from .simulate import SimConfig, SimResult, run_round, run_simulation

__version__ = "0.1.0"
