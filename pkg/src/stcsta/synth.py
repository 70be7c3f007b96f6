"""Deterministic synthetic dataset generator in the canonical CSV schema.

Each feature has a shared base signal (sinusoid, random walk, or white
noise). A node's stream blends the base with an independent component of
the same kind through a mixing weight: weight 1.0 makes all nodes'
streams identical pre-noise (rho = 1), weight 0.0 makes them independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ALL_FEATURES, Feature

KINDS = ("sinusoid", "random_walk", "white_noise")


@dataclass(frozen=True)
class FeatureSpec:
    kind: str = "sinusoid"
    base: float = 0.0  # constant offset
    amplitude: float = 1.0  # sinusoid amplitude / walk step scale
    period_samples: float = 200.0  # sinusoid period
    noise_std: float = 0.1  # per-stream additive noise
    mixing: float = 0.9  # weight of the shared base signal

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if not 0.0 <= self.mixing <= 1.0:
            raise ValueError("mixing must be in [0, 1]")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")


@dataclass(frozen=True)
class SynthSpec:
    nodes: int = 4
    length: int = 2000
    step_seconds: float = 120.0
    seed: int = 0
    features: dict = None  # Feature -> FeatureSpec

    def __post_init__(self):
        if self.nodes < 1:
            raise ValueError("nodes must be >= 1")
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.features is None:
            object.__setattr__(
                self, "features", {f: FeatureSpec() for f in ALL_FEATURES}
            )

    @classmethod
    def from_dict(cls, raw: dict) -> "SynthSpec":
        features = {}
        for name, fs in raw.get("features", {}).items():
            features[Feature(name)] = FeatureSpec(**fs)
        for f in ALL_FEATURES:
            features.setdefault(f, FeatureSpec())
        return cls(
            nodes=raw.get("nodes", 4),
            length=raw.get("length", 2000),
            step_seconds=raw.get("step_seconds", 120.0),
            seed=raw.get("seed", 0),
            features=features,
        )


def _signal(kind: str, spec: FeatureSpec, length: int, rng, phase: float) -> np.ndarray:
    t = np.arange(length)
    if kind == "sinusoid":
        return spec.amplitude * np.sin(2 * np.pi * t / spec.period_samples + phase)
    if kind == "random_walk":
        steps = rng.normal(0.0, spec.amplitude / np.sqrt(length), size=length)
        return np.cumsum(steps)
    return rng.normal(0.0, spec.amplitude, size=length)  # white_noise


def generate(spec: SynthSpec, seed: int | None = None) -> dict:
    """Per-feature (nodes, length) value arrays; deterministic given seed."""
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    out = {}
    for feature in ALL_FEATURES:
        fs = spec.features[feature]
        base = _signal(fs.kind, fs, spec.length, rng, phase=rng.uniform(0, 2 * np.pi))
        rows = np.empty((spec.nodes, spec.length))
        for i in range(spec.nodes):
            own = _signal(fs.kind, fs, spec.length, rng, phase=rng.uniform(0, 2 * np.pi))
            noise = fs.noise_std * rng.standard_normal(spec.length)
            rows[i] = fs.base + fs.mixing * base + (1.0 - fs.mixing) * own + noise
        out[feature] = rows
    return out


def write_csv(spec: SynthSpec, path, seed: int | None = None) -> None:
    """Emit the canonical ingest CSV; byte-identical on repeat runs."""
    data = generate(spec, seed)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("timestamp,node_id," + ",".join(f.value for f in ALL_FEATURES) + "\n")
        for k in range(spec.length):
            ts = int(k * spec.step_seconds)
            for node in range(spec.nodes):
                cells = ",".join(
                    format(data[f][node, k], ".12g") for f in ALL_FEATURES
                )
                fh.write(f"{ts},{node},{cells}\n")
