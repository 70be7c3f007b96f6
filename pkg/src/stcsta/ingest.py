"""CSV loading, feature selection, and scenario construction by decimation.

Canonical CSV schema (UTF-8, header required):
    timestamp,node_id,ambient_temp,surface_temp,rel_humidity,wind_speed
One row per node per native sample time; timestamp in seconds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ALL_FEATURES, Feature, ReadingMatrix, RoundConfig, StreamId

REQUIRED_COLUMNS = ("timestamp", "node_id")


class IngestError(Exception):
    pass


@dataclass(frozen=True)
class RejectedRow:
    line_number: int
    reason: str


@dataclass
class RawDataset:
    """Per-stream (timestamp, value) sequences at the native cadence.

    Streams share one timestamp axis; sequences are sorted by timestamp.
    """

    timestamps: np.ndarray  # shape (L,)
    series: dict[StreamId, np.ndarray]  # each shape (L,)
    rejections: list[RejectedRow] = field(default_factory=list)

    @property
    def n_streams(self) -> int:
        return len(self.series)

    @property
    def length(self) -> int:
        return len(self.timestamps)

    def streams(self) -> list[StreamId]:
        return sorted(self.series)


def load_dataset(path, features=ALL_FEATURES, max_readings: int | None = None) -> RawDataset:
    """Load the canonical CSV into per-stream sequences.

    Rows with unparseable values are rejected and reported with their
    line numbers; rows must arrive in non-decreasing timestamp order per
    node. Sequences are truncated to max_readings sample times.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"dataset file not found: {path}")
    features = [Feature(f) for f in features]

    per_node: dict[int, dict[str, list]] = {}
    rejections: list[RejectedRow] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file, header row required")
        missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
        missing += [f.value for f in features if f.value not in reader.fieldnames]
        if missing:
            raise IngestError(f"{path}: missing required columns: {', '.join(missing)}")
        for row in reader:
            line = reader.line_num
            try:
                ts = float(row["timestamp"])
                node = int(row["node_id"])
                vals = [float(row[f.value]) for f in features]
            except (TypeError, ValueError) as exc:
                rejections.append(RejectedRow(line, f"unparseable row: {exc}"))
                continue
            if any(np.isnan(v) for v in vals):
                rejections.append(RejectedRow(line, "missing value in a required feature"))
                continue
            bucket = per_node.setdefault(node, {"ts": [], "vals": []})
            if bucket["ts"] and ts <= bucket["ts"][-1]:
                raise IngestError(
                    f"{path}:{line}: non-monotone timestamp {ts} for node {node}"
                )
            bucket["ts"].append(ts)
            bucket["vals"].append(vals)

    if not per_node:
        return RawDataset(np.empty(0), {}, rejections)

    lengths = {n: len(b["ts"]) for n, b in per_node.items()}
    length = min(lengths.values())
    if max_readings is not None:
        length = min(length, max_readings)
    ref_node = min(per_node)
    timestamps = np.asarray(per_node[ref_node]["ts"][:length], dtype=float)
    for node, bucket in per_node.items():
        if not np.array_equal(np.asarray(bucket["ts"][:length]), timestamps):
            raise IngestError(
                f"{path}: node {node} timestamps not row-aligned with node {ref_node}"
            )

    series: dict[StreamId, np.ndarray] = {}
    for node, bucket in sorted(per_node.items()):
        arr = np.asarray(bucket["vals"][:length], dtype=float)
        for col, feat in enumerate(features):
            series[StreamId(node, feat)] = arr[:, col].copy()
    return RawDataset(timestamps, series, rejections)


def decimate(dataset: RawDataset, k: int) -> RawDataset:
    """Keep every k-th reading starting at index 0 (widens the sample interval)."""
    if k < 1:
        raise ValueError(f"decimation factor must be >= 1, got {k}")
    if k == 1:
        return dataset
    return RawDataset(
        dataset.timestamps[::k].copy(),
        {s: v[::k].copy() for s, v in dataset.series.items()},
        list(dataset.rejections),
    )


def to_reading_matrix(dataset: RawDataset, config: RoundConfig) -> ReadingMatrix:
    """Align the dataset to round slots as a dense ground-truth matrix.

    Values pass through bit-exactly; slot timestamps are synthesized on
    the perfectly regular slot grid.
    """
    needed = config.rounds * config.slots_per_round
    if dataset.length < needed:
        raise IngestError(
            f"dataset has {dataset.length} readings per stream, "
            f"need rounds*slots = {needed}"
        )
    streams = dataset.streams()
    if not streams:
        raise IngestError("dataset has no streams")
    values = np.stack([dataset.series[s][:needed] for s in streams])
    timestamps = np.arange(needed, dtype=float) * config.slot_seconds
    return ReadingMatrix(streams, values, timestamps)
