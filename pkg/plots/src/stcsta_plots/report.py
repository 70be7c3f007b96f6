"""Batch report: grouped bars per metric plus one overlay per feature."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import FEATURES, read_manifest
from .overlay import render_overlay

BAR_METRICS = [
    ("sampled_pct", "data sampled [% of budget]"),
    ("transmitted_pct", "data transmitted [% of budget]"),
    ("total_energy_J", "cluster energy [J]"),
]


@dataclass
class ReportSummary:
    images: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def warning_count(self) -> int:
        return len(self.warnings)


def _bar_chart(rows, metric, label, dest, fmt):
    scenarios = sorted({r["scenario"] for r in rows})
    modes = sorted({r["mode"] for r in rows})
    value = {
        (r["scenario"], r["mode"]): float(r[metric]) for r in rows if r.get(metric)
    }
    fig, ax = plt.subplots(figsize=(6.5, 3.4))
    width = 0.8 / len(modes)
    x = np.arange(len(scenarios))
    for m, mode in enumerate(modes):
        heights = [value.get((s, mode), 0.0) for s in scenarios]
        ax.bar(x + (m - (len(modes) - 1) / 2) * width, heights, width, label=mode)
    ax.set_xticks(x)
    ax.set_xticklabels(scenarios)
    ax.set_xlabel("scenario")
    ax.set_ylabel(label)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = dest / f"bars_{metric}.{fmt}"
    fig.savefig(path, format=fmt, dpi=110)
    plt.close(fig)
    return path


def _write_index(dest, images, warnings_):
    lines = [
        "<!doctype html>",
        "<html><head><title>simulation report</title></head><body>",
        "<h1>Simulation report</h1>",
    ]
    if warnings_:
        lines.append("<h2>Warnings</h2><ul>")
        lines.extend(f"<li>{w}</li>" for w in warnings_)
        lines.append("</ul>")
    for img in images:
        lines.append(f'<div><h3>{img.name}</h3><img src="{img.name}"></div>')
    lines.append("</body></html>")
    index = dest / "index.html"
    index.write_text("\n".join(lines) + "\n")
    return index


def render_report(out_dir, fmt: str = "png", dest=None) -> ReportSummary:
    """Render bar charts and overlays for a simulation output directory.

    Missing CSVs are skipped with a warning recorded in the summary.
    Filenames depend only on the directory contents, so reruns produce
    the same file set.
    """
    out_dir = Path(out_dir)
    if fmt not in ("png", "svg"):
        raise ValueError(f"format must be png or svg, got {fmt!r}")
    dest = Path(dest) if dest is not None else out_dir / "report"
    dest.mkdir(parents=True, exist_ok=True)
    summary = ReportSummary()

    manifest_path = out_dir / "manifest.csv"
    if manifest_path.exists():
        rows = read_manifest(manifest_path)
        if rows:
            for metric, label in BAR_METRICS:
                summary.images.append(_bar_chart(rows, metric, label, dest, fmt))
        else:
            summary.warnings.append("manifest.csv has no rows")
    else:
        summary.warnings.append(f"missing {manifest_path}")

    cell = _reference_cell(out_dir)
    if cell is None:
        summary.warnings.append("no scenario/mode directory with truth + completed CSVs")
    else:
        truth_csv = cell / "truth.csv"
        completed_csv = cell / "completed.csv"
        for feature in FEATURES:
            try:
                node = _first_node(completed_csv)
                path = render_overlay(
                    truth_csv,
                    completed_csv,
                    (node, feature),
                    out_path=dest / f"overlay_{feature}.{fmt}",
                    fmt=fmt,
                )
                summary.images.append(path)
            except ValueError as exc:
                summary.warnings.append(f"overlay {feature}: {exc}")

    _write_index(dest, summary.images, summary.warnings)
    return summary


def _reference_cell(out_dir: Path):
    """First scenario/mode directory (sorted) holding both matrices."""
    for scenario in sorted(p for p in out_dir.iterdir() if p.is_dir()):
        for mode in sorted(p for p in scenario.iterdir() if p.is_dir()):
            if (mode / "truth.csv").exists() and (mode / "completed.csv").exists():
                return mode
    return None


def _first_node(completed_csv: Path) -> int:
    with open(completed_csv) as fh:
        fh.readline()
        first = fh.readline().split(",")
    return int(first[1])
