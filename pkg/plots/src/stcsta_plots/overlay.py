"""Truth-vs-reconstruction overlay for a single stream."""

from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import FEATURE_UNITS, FEATURES, read_wide_matrix


def _parse_stream(stream) -> tuple[int, str]:
    if isinstance(stream, (tuple, list)) and len(stream) == 2:
        node, feature = stream
    elif isinstance(stream, str) and ":" in stream:
        node_s, feature = stream.split(":", 1)
        node = int(node_s)
    else:
        raise ValueError(
            f"stream must be (node, feature) or 'node:feature', got {stream!r}"
        )
    if feature not in FEATURES:
        raise ValueError(f"unknown feature {feature!r}, expected one of {FEATURES}")
    return int(node), feature


def render_overlay(
    truth_csv,
    completed_csv,
    stream,
    slot_range=None,
    out_path=None,
    fmt: str = "png",
):
    """Plot truth and reconstruction for one stream, shading imputed slots.

    Returns the written image path. slot_range is a (lo, hi) slot pair,
    clipped to the data with a warning when it reaches past the end.
    """
    node, feature = _parse_stream(stream)
    truth = read_wide_matrix(truth_csv)
    completed = read_wide_matrix(completed_csv)
    key = (node, feature)
    if key not in truth.series or key not in completed.series:
        raise ValueError(f"stream {node}:{feature} not present in the CSVs")
    t_vals = truth.series[key]
    c_vals = completed.series[key]
    if t_vals.shape != c_vals.shape:
        raise ValueError("truth and completed files have different lengths")
    n = len(t_vals)
    lo, hi = (0, n) if slot_range is None else (int(slot_range[0]), int(slot_range[1]))
    if lo < 0 or hi > n:
        warnings.warn(f"slot_range ({lo}, {hi}) clipped to (0, {n})", stacklevel=2)
        lo, hi = max(lo, 0), min(hi, n)
    if lo >= hi:
        raise ValueError(f"empty slot range ({lo}, {hi})")
    slots = np.arange(lo, hi)
    flags = completed.imputed.get(key, np.zeros(n, dtype=bool))[lo:hi]

    fig, ax = plt.subplots(figsize=(9, 3.2))
    in_band = False
    for i, flagged in enumerate(flags):
        if flagged and not in_band:
            start = slots[i]
            in_band = True
        elif not flagged and in_band:
            ax.axvspan(start - 0.5, slots[i] - 0.5, color="0.88", zorder=0)
            in_band = False
    if in_band:
        ax.axvspan(start - 0.5, slots[-1] + 0.5, color="0.88", zorder=0)
    ax.plot(slots, t_vals[lo:hi], label="truth", color="tab:blue", lw=1.2)
    ax.plot(
        slots,
        c_vals[lo:hi],
        label="reconstruction",
        color="tab:red",
        lw=1.0,
        ls="--",
    )
    ax.set_xlabel("slot")
    ax.set_ylabel(f"{feature} [{FEATURE_UNITS[feature]}]")
    ax.set_title(f"node {node} {feature} (shaded: imputed)")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()

    if out_path is None:
        out_path = Path(completed_csv).parent / f"overlay_{node}_{feature}.{fmt}"
    out_path = Path(out_path)
    fig.savefig(out_path, format=fmt, dpi=110)
    plt.close(fig)
    return out_path
