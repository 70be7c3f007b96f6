"""Shared data model: streams, rounds, reading matrices, schedules.

All other modules speak these types. Values are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


class Feature(str, Enum):
    AMBIENT_TEMP = "ambient_temp"
    SURFACE_TEMP = "surface_temp"
    REL_HUMIDITY = "rel_humidity"
    WIND_SPEED = "wind_speed"


ALL_FEATURES = tuple(Feature)

FEATURE_UNITS = {
    Feature.AMBIENT_TEMP: "degC",
    Feature.SURFACE_TEMP: "degC",
    Feature.REL_HUMIDITY: "%",
    Feature.WIND_SPEED: "m/s",
}


@dataclass(frozen=True, order=True)
class StreamId:
    """One (node, feature) measurement sequence; the scheduling unit."""

    node_index: int
    feature: Feature

    def __post_init__(self):
        if self.node_index < 0:
            raise ValueError(f"node_index must be >= 0, got {self.node_index}")

    def __str__(self):
        return f"n{self.node_index}:{self.feature.value}"


@dataclass(frozen=True)
class RoundConfig:
    """Round of period_seconds subdivided into slots_per_round slots.

    SR_max = slots_per_round samples per round; slot duration is
    period_seconds / slots_per_round.
    """

    period_seconds: float
    slots_per_round: int
    rounds: int

    def __post_init__(self):
        if self.period_seconds <= 0:
            raise ValueError("period_seconds must be > 0")
        if self.slots_per_round < 2:
            raise ValueError("slots_per_round must be >= 2")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")

    @property
    def sr_max(self) -> int:
        return self.slots_per_round

    @property
    def slot_seconds(self) -> float:
        return self.period_seconds / self.slots_per_round


class ReadingMatrix:
    """N streams x T slots of measurements; NaN marks a non-sampled slot.

    Timestamps are strictly increasing with a constant slot step.
    The values array is write-protected after construction.
    """

    def __init__(self, streams, values, slot_timestamps):
        self.streams: tuple[StreamId, ...] = tuple(streams)
        values = np.asarray(values, dtype=float)
        timestamps = np.asarray(slot_timestamps, dtype=float)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        if values.shape[0] != len(self.streams):
            raise ValueError(
                f"{len(self.streams)} streams but {values.shape[0]} matrix rows"
            )
        if timestamps.shape != (values.shape[1],):
            raise ValueError("slot_timestamps length must equal the slot count")
        if len(set(self.streams)) != len(self.streams):
            raise ValueError("duplicate stream ids")
        values = values.copy()
        values.setflags(write=False)
        timestamps = timestamps.copy()
        timestamps.setflags(write=False)
        self.values = values
        self.slot_timestamps = timestamps

    @property
    def n_streams(self) -> int:
        return len(self.streams)

    @property
    def n_slots(self) -> int:
        return self.values.shape[1]

    def stream_index(self, stream: StreamId) -> int:
        return self.streams.index(stream)

    def is_dense(self) -> bool:
        return not np.isnan(self.values).any()

    def round_slice(self, round_index: int, slots_per_round: int) -> np.ndarray:
        lo = round_index * slots_per_round
        return self.values[:, lo : lo + slots_per_round]

    def with_values(self, values) -> "ReadingMatrix":
        return ReadingMatrix(self.streams, values, self.slot_timestamps)


@dataclass(frozen=True)
class CorrelationRow:
    stream: StreamId
    best_match: StreamId
    rho: float


@dataclass(frozen=True)
class CorrelationTable:
    """Per-stream best match and its correlation degree."""

    rows: tuple[CorrelationRow, ...]

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            if row.stream == row.best_match:
                raise ValueError(f"stream {row.stream} matched with itself")
            if not -1.0 <= row.rho <= 1.0:
                raise ValueError(f"rho out of [-1, 1]: {row.rho}")
            if row.stream in seen:
                raise ValueError(f"duplicate row for stream {row.stream}")
            seen.add(row.stream)

    def row_for(self, stream: StreamId) -> CorrelationRow:
        for row in self.rows:
            if row.stream == stream:
                return row
        raise KeyError(str(stream))


@dataclass(frozen=True)
class SamplingSchedule:
    """Per-stream reduction percentage for the next round.

    samples_next_round is derived: max(1, floor(SR_max * (1 - pct/100))).
    """

    reductions: dict[StreamId, float]
    sr_max: int

    def __post_init__(self):
        for stream, pct in self.reductions.items():
            if not 0.0 <= pct <= 100.0:
                raise ValueError(f"reduction for {stream} out of [0, 100]: {pct}")

    def samples_next_round(self, stream: StreamId) -> int:
        count, _ = slots_for_reduction(self.reductions[stream], self.sr_max)
        return count

    @classmethod
    def no_reduction(cls, streams, sr_max: int) -> "SamplingSchedule":
        return cls({s: 0.0 for s in streams}, sr_max)


@dataclass(frozen=True)
class EnergyParams:
    """Per-activity energy coefficients (first-order radio model)."""

    e_sample: float = 0.5e-6  # J per sample
    e_log_per_byte: float = 0.1e-6  # J per byte logged
    e_cpu_per_cycle: float = 1e-9  # J per CPU cycle
    e_elec: float = 50e-9  # J per bit, radio electronics
    e_amp: float = 100e-12  # J per bit per m^2, amplifier
    packet_bits: int = 512
    tx_distance_m: float = 50.0
    count_rx_energy: bool = False

    def __post_init__(self):
        for name in ("e_sample", "e_log_per_byte", "e_cpu_per_cycle",
                     "e_elec", "e_amp", "tx_distance_m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.packet_bits < 0:
            raise ValueError("packet_bits must be >= 0")


@dataclass(frozen=True)
class Violation:
    message: str
    stream: Optional[StreamId] = None
    slot: Optional[int] = None

    def __str__(self):
        where = []
        if self.stream is not None:
            where.append(f"stream {self.stream}")
        if self.slot is not None:
            where.append(f"slot {self.slot}")
        suffix = f" ({', '.join(where)})" if where else ""
        return self.message + suffix


def validate_matrix(matrix: ReadingMatrix, config: RoundConfig) -> list[Violation]:
    """Check a ReadingMatrix against the round structure.

    Returns every violation found (empty list means the matrix is valid).
    Violations are data, not failures.
    """
    violations = []
    m = config.slots_per_round
    T = matrix.n_slots
    if T % m != 0:
        violations.append(Violation(f"T={T} not a multiple of slots_per_round={m}"))
    ts = matrix.slot_timestamps
    if T >= 2:
        steps = np.diff(ts)
        if not np.all(steps > 0):
            slot = int(np.argmax(steps <= 0)) + 1
            violations.append(Violation("timestamps not strictly increasing", slot=slot))
        elif not np.allclose(steps, config.slot_seconds, rtol=1e-9, atol=1e-9):
            slot = int(np.argmax(~np.isclose(steps, config.slot_seconds))) + 1
            violations.append(
                Violation(
                    f"timestamp step differs from slot duration {config.slot_seconds}",
                    slot=slot,
                )
            )
    # First slot of every covered round must hold a value for every stream.
    for r in range(T // m):
        col = r * m
        missing = np.isnan(matrix.values[:, col])
        for i in np.flatnonzero(missing):
            violations.append(
                Violation(
                    "first slot of round must be present",
                    stream=matrix.streams[int(i)],
                    slot=col,
                )
            )
    return violations


def slots_for_reduction(reduction_pct: float, sr_max: int) -> tuple[int, int]:
    """Samples per round and inter-sample gap for a reduction percentage.

    count = max(1, floor(sr_max * (1 - pct/100))); gap = floor(sr_max / count).
    Sampled slots are 0, gap, 2*gap, ... (count of them), so the
    first-of-round sample is always taken.
    """
    if not 0.0 <= reduction_pct <= 100.0:
        raise ValueError(f"reduction_pct out of [0, 100]: {reduction_pct}")
    if sr_max < 1:
        raise ValueError("sr_max must be >= 1")
    count = max(1, int(np.floor(sr_max * (1.0 - reduction_pct / 100.0))))
    gap = sr_max // count
    return count, gap


def sampled_slots(reduction_pct: float, sr_max: int) -> np.ndarray:
    """Slot indices sampled within one round under the given reduction."""
    count, gap = slots_for_reduction(reduction_pct, sr_max)
    return np.arange(count) * gap
