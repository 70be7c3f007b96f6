"""Cluster-head scheduling: forward-fill, pairwise correlation, best-match
table, occurrence-ordered reduction allocation, and the exaggerated variant.

The allocation walk pairs each stream with its best match so that when
one of the pair samples sparsely the other keeps sampling densely,
letting them compensate for each other at reconstruction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CorrelationRow,
    CorrelationTable,
    ReadingMatrix,
    SamplingSchedule,
    StreamId,
)


def forward_fill(row) -> np.ndarray:
    """Replace each NaN with the nearest preceding present value.

    The first element must be present (first-of-round guarantee).
    """
    row = np.asarray(row, dtype=float)
    if row.size == 0:
        raise ValueError("empty sequence")
    if np.isnan(row[0]):
        raise ValueError("leading NaN: first slot of a round must be present")
    present = ~np.isnan(row)
    # index of the last present value at or before each position
    idx = np.maximum.accumulate(np.where(present, np.arange(row.size), 0))
    return row[idx]


def pearson(u, v) -> float:
    """Sample Pearson coefficient ((n-1) normalization, sample std devs).

    Returns 0.0 when either sequence is constant: a fully idle stream
    forward-fills to a constant row and must not trigger a reduction.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    n = u.size
    if n < 2:
        raise ValueError("need at least 2 samples")
    du = u - u.mean()
    dv = v - v.mean()
    ssu = np.dot(du, du)
    ssv = np.dot(dv, dv)
    if ssu == 0.0 or ssv == 0.0:
        return 0.0
    # squared form: for exact (anti-)copies the numerator and the two
    # sums of squares are the same float sums, so rho comes out +-1 exactly
    cov = np.dot(du, dv)
    rho = np.copysign(np.sqrt(cov * cov / (ssu * ssv)), cov)
    return float(min(1.0, max(-1.0, rho)))


def correlation_matrix(matrix: ReadingMatrix) -> np.ndarray:
    """Upper-triangular N x N matrix of pairwise Pearson coefficients.

    The input covers one round and must already be forward-filled
    (dense). Entries below the diagonal and on it are 0.
    """
    if not matrix.is_dense():
        raise ValueError("matrix must be forward-filled (dense) first")
    values = matrix.values
    n = matrix.n_streams
    corr = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            corr[i, j] = pearson(values[i], values[j])
    return corr


def _symmetric(corr: np.ndarray) -> np.ndarray:
    return corr + corr.T


def best_match_table(corr: np.ndarray, streams) -> CorrelationTable:
    """For each stream the other stream maximizing rho; ties -> smallest index."""
    streams = tuple(streams)
    n = len(streams)
    if n < 2:
        raise ValueError("need at least 2 streams to match")
    full = _symmetric(corr)
    rows = []
    for i in range(n):
        candidates = full[i].copy()
        candidates[i] = -np.inf
        j = int(np.argmax(candidates))  # argmax returns the first (smallest) index
        rows.append(CorrelationRow(streams[i], streams[j], float(candidates[j])))
    return CorrelationTable(tuple(rows))


@dataclass(frozen=True)
class OccurrenceOrder:
    """Streams of the best-match column, ascending by occurrence count.

    Streams with equal counts keep first-appearance order (best-match
    column scanned by ascending stream index).
    """

    entries: tuple[tuple[StreamId, int], ...]

    def streams(self) -> list[StreamId]:
        return [s for s, _ in self.entries]


def occurrence_order(table: CorrelationTable) -> OccurrenceOrder:
    """Count best-match occurrences and order them ascending (stable)."""
    counts: dict[StreamId, int] = {}
    for row in table.rows:
        counts[row.best_match] = counts.get(row.best_match, 0) + 1
    # dict preserves first-appearance order; sorted() is stable
    entries = sorted(counts.items(), key=lambda kv: kv[1])
    return OccurrenceOrder(tuple(entries))


def _clamp_pct(x: float) -> float:
    return min(100.0, max(0.0, x))


def allocate_reductions(
    table: CorrelationTable, order: OccurrenceOrder, sr_max: int
) -> SamplingSchedule:
    """Walk the occurrence order and assign complementary reductions.

    A stream whose match is still undecided is reduced by its correlation
    degree (as a percentage); otherwise by the complement of its match's
    reduction, so the pair's reductions sum to exactly 100. Streams never
    matched by anyone get the complement of their own match's reduction.
    """
    reductions: dict[StreamId, float] = {}
    for stream in order.streams():
        row = table.row_for(stream)
        if row.best_match not in reductions:
            reductions[stream] = _clamp_pct(row.rho * 100.0)
        else:
            reductions[stream] = 100.0 - reductions[row.best_match]
    for row in table.rows:
        if row.stream not in reductions:
            reductions[row.stream] = 100.0 - reductions[row.best_match]
    return SamplingSchedule(reductions, sr_max)


def exaggerated_allocate(table: CorrelationTable, sr_max: int) -> SamplingSchedule:
    """Ablation: every stream reduced by its own best correlation.

    No ordering, no compensation; highly correlated pairs skip
    simultaneously, which is the failure mode this variant demonstrates.
    """
    reductions = {
        row.stream: _clamp_pct(row.rho * 100.0) for row in table.rows
    }
    return SamplingSchedule(reductions, sr_max)


def schedule_for_round(
    round_values: np.ndarray,
    streams,
    sr_max: int,
    mode: str,
) -> SamplingSchedule:
    """End-of-round CH computation: fill, correlate, allocate per mode."""
    streams = tuple(streams)
    if mode == "fixed_max" or len(streams) < 2:
        return SamplingSchedule.no_reduction(streams, sr_max)
    filled = np.stack([forward_fill(r) for r in round_values])
    filled_matrix = ReadingMatrix(
        streams, filled, np.arange(filled.shape[1], dtype=float)
    )
    corr = correlation_matrix(filled_matrix)
    table = best_match_table(corr, streams)
    if mode == "stcsta":
        return allocate_reductions(table, occurrence_order(table), sr_max)
    if mode == "exaggerated":
        return exaggerated_allocate(table, sr_max)
    raise ValueError(f"unknown scheduling mode: {mode!r}")
