"""Readers for the CSV artifacts of a simulation output directory.

This package never recomputes metrics; everything rendered comes
straight from the CSVs the simulator wrote.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FEATURES = ("ambient_temp", "surface_temp", "rel_humidity", "wind_speed")

FEATURE_UNITS = {
    "ambient_temp": "deg C",
    "surface_temp": "deg C",
    "rel_humidity": "%",
    "wind_speed": "m/s",
}


@dataclass
class WideMatrix:
    """One truth.csv or completed.csv file: per-stream series over slots."""

    timestamps: np.ndarray
    nodes: list[int]
    series: dict  # (node, feature) -> np.ndarray
    imputed: dict  # (node, feature) -> bool np.ndarray (empty for truth)


def read_manifest(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [dict(row) for row in csv.DictReader(fh)]


def read_wide_matrix(path) -> WideMatrix:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    has_flags = any(name.endswith("_imputed") for name in rows[0])
    by_node: dict[int, list[dict]] = {}
    timestamps: list[float] = []
    for row in rows:
        node = int(row["node_id"])
        by_node.setdefault(node, []).append(row)
    nodes = sorted(by_node)
    n_slots = len(by_node[nodes[0]])
    for node in nodes:
        if len(by_node[node]) != n_slots:
            raise ValueError(f"{path}: node {node} has a different row count")
    timestamps = np.array([float(r["timestamp"]) for r in by_node[nodes[0]]])
    series: dict = {}
    imputed: dict = {}
    for node in nodes:
        node_rows = by_node[node]
        for feature in FEATURES:
            if node_rows[0].get(feature, "") == "":
                continue
            series[(node, feature)] = np.array(
                [float(r[feature]) for r in node_rows]
            )
            if has_flags:
                imputed[(node, feature)] = np.array(
                    [r[f"{feature}_imputed"] == "1" for r in node_rows]
                )
    return WideMatrix(timestamps, nodes, series, imputed)
