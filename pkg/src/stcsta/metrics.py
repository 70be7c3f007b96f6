"""Scoring and census: RMSE/MAE over imputed cells, traffic percentages,
energy aggregation, and the correlated-sensor census per period."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Feature, ReadingMatrix, RoundConfig, StreamId
from .scheduler import pearson


@dataclass(frozen=True)
class QualityScore:
    rmse: float
    mae: float


def quality(
    truth: ReadingMatrix, completed: ReadingMatrix, mask: np.ndarray
) -> dict:
    """RMSE and MAE over masked (imputed) cells, per feature and overall.

    mask is a boolean (N, T) array marking the cells that were NaN at
    the sink. Features without any masked cell are reported absent.
    """
    if truth.values.shape != completed.values.shape:
        raise ValueError("truth and completed dimensions differ")
    if mask.shape != truth.values.shape:
        raise ValueError("mask dimensions differ from matrices")
    errors = completed.values - truth.values
    scores: dict = {}
    for feature in {s.feature for s in truth.streams}:
        rows = [i for i, s in enumerate(truth.streams) if s.feature == feature]
        sub = mask[rows]
        if not sub.any():
            continue
        e = errors[rows][sub]
        scores[feature] = QualityScore(float(np.sqrt(np.mean(e**2))), float(np.mean(np.abs(e))))
    if mask.any():
        e = errors[mask]
        scores["overall"] = QualityScore(float(np.sqrt(np.mean(e**2))), float(np.mean(np.abs(e))))
    return scores


def traffic_pcts(counters: dict, config: RoundConfig, n_rounds: int):
    """Sampled and transmitted percentages of the SR_max budget.

    Returns (per_node, cluster) where per_node maps node_index to a
    (sampled_pct, transmitted_pct) pair. With zero rounds the
    percentages are undefined and both dicts come back empty / None.
    """
    if n_rounds == 0 or not counters:
        return {}, None
    budget_per_stream = n_rounds * config.sr_max
    node_samples: dict[int, int] = {}
    node_tx: dict[int, int] = {}
    node_streams: dict[int, int] = {}
    for stream, c in counters.items():
        node_samples[stream.node_index] = node_samples.get(stream.node_index, 0) + c.samples
        node_tx[stream.node_index] = node_tx.get(stream.node_index, 0) + c.tx_packets
        node_streams[stream.node_index] = node_streams.get(stream.node_index, 0) + 1
    per_node = {
        node: (
            100.0 * node_samples[node] / (node_streams[node] * budget_per_stream),
            100.0 * node_tx[node] / (node_streams[node] * budget_per_stream),
        )
        for node in sorted(node_samples)
    }
    total_budget = len(counters) * budget_per_stream
    cluster = (
        100.0 * sum(node_samples.values()) / total_budget,
        100.0 * sum(node_tx.values()) / total_budget,
    )
    return per_node, cluster


def correlation_census(
    truth: ReadingMatrix, threshold: float = 0.5, period_slots: int | None = None
):
    """Per-stream, per-period count of other streams with rho >= threshold.

    Returns (counts, mean_counts): counts is an (N, P) integer array over
    the P full periods, mean_counts the per-stream mean across periods.
    """
    if not -1.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (-1, 1]")
    n, T = truth.values.shape
    period = period_slots if period_slots is not None else T
    if period < 2:
        raise ValueError("period_slots must be >= 2")
    n_periods = T // period
    if n_periods == 0:
        raise ValueError("matrix shorter than one period")
    counts = np.zeros((n, n_periods), dtype=int)
    for p in range(n_periods):
        window = truth.values[:, p * period : (p + 1) * period]
        for i in range(n):
            for j in range(i + 1, n):
                if pearson(window[i], window[j]) >= threshold:
                    counts[i, p] += 1
                    counts[j, p] += 1
    return counts, counts.mean(axis=1)
