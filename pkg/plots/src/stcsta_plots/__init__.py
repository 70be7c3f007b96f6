"""Static report rendering for simulation output directories."""

from .io import FEATURES, WideMatrix, read_manifest, read_wide_matrix
from .overlay import render_overlay
from .report import ReportSummary, render_report

__version__ = "0.1.0"

__all__ = [
    "FEATURES",
    "ReportSummary",
    "WideMatrix",
    "read_manifest",
    "read_wide_matrix",
    "render_overlay",
    "render_report",
]
