"""Per-node energy accounting and cluster-head memory footprint.

E_node = E_sampling + E_logging + E_processing + E_radio, with the radio
term following the first-order model (electronics per bit plus a
d^2 amplifier term).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import EnergyParams


@dataclass(frozen=True)
class ActivityCounters:
    """What a node actually did: the inputs to the energy model."""

    samples: int = 0
    bytes_logged: int = 0
    cpu_cycles: int = 0
    tx_packets: int = 0
    rx_packets: int = 0
    tx_distance_m: float | None = None  # falls back to params.tx_distance_m

    def __post_init__(self):
        for name in ("samples", "bytes_logged", "cpu_cycles", "tx_packets", "rx_packets"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.tx_distance_m is not None and self.tx_distance_m < 0:
            raise ValueError("tx_distance_m must be >= 0")

    def __add__(self, other: "ActivityCounters") -> "ActivityCounters":
        return ActivityCounters(
            self.samples + other.samples,
            self.bytes_logged + other.bytes_logged,
            self.cpu_cycles + other.cpu_cycles,
            self.tx_packets + other.tx_packets,
            self.rx_packets + other.rx_packets,
            other.tx_distance_m if other.tx_distance_m is not None else self.tx_distance_m,
        )


@dataclass(frozen=True)
class EnergyReport:
    e_sampling: float
    e_logging: float
    e_processing: float
    e_radio: float

    @property
    def e_total(self) -> float:
        return self.e_sampling + self.e_logging + self.e_processing + self.e_radio


def radio_tx_energy(bits: int, distance_m: float, params: EnergyParams) -> float:
    """Energy to transmit `bits` over `distance_m`: b*e_elec + b*e_amp*d^2."""
    if bits < 0:
        raise ValueError("bits must be >= 0")
    if distance_m < 0:
        raise ValueError("distance_m must be >= 0")
    return bits * params.e_elec + bits * params.e_amp * distance_m**2


def node_energy(counters: ActivityCounters, params: EnergyParams) -> EnergyReport:
    """Evaluate the four-component energy model for one node."""
    distance = (
        counters.tx_distance_m
        if counters.tx_distance_m is not None
        else params.tx_distance_m
    )
    e_radio = counters.tx_packets * radio_tx_energy(params.packet_bits, distance, params)
    if params.count_rx_energy:
        e_radio += counters.rx_packets * params.packet_bits * params.e_elec
    return EnergyReport(
        e_sampling=counters.samples * params.e_sample,
        e_logging=counters.bytes_logged * params.e_log_per_byte,
        e_processing=counters.cpu_cycles * params.e_cpu_per_cycle,
        e_radio=e_radio,
    )


def ch_memory_bytes(n_streams: int, sr_max: int) -> tuple[int, int, int]:
    """Cluster-head memory footprint of the two scheduling phases.

    phase1 covers buffering and correlation (8*(N*(SR_max + N/2 + 4) + 1)
    bytes), phase2 the matching and allocation bookkeeping (8*(6N + 1)
    bytes). Fractional byte totals round up.
    """
    if n_streams < 1:
        raise ValueError("n_streams must be >= 1")
    if sr_max < 1:
        raise ValueError("sr_max must be >= 1")
    n = n_streams
    phase1 = math.ceil(8 * (n * (sr_max + n / 2 + 4) + 1))
    phase2 = 8 * (6 * n + 1)
    return phase1, phase2, max(phase1, phase2)
