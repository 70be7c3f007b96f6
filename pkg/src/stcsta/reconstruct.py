"""Sink-side imputation of non-sampled cells with an EM-fitted linear
dynamical system over the co-evolving streams.

Model: z_t = F z_{t-1} + w_t, w_t ~ N(0, Q); x_t = G z_t + v_t,
v_t ~ N(0, R) with diagonal R. Missing cells are filled with their
current model estimate before each exact filter/smoother pass
(initial fill = forward fill), and the closed-form M-step updates all
parameters; the loop stops when the log-likelihood stops improving.

Streams are standardized over their observed cells before fitting so
that mixed units do not dominate the likelihood, and de-standardized
on output.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import ReadingMatrix
from .scheduler import forward_fill

_RIDGE = 1e-8
_R_FLOOR = 1e-9
_MAX_FILL_PASSES = 5
_FILL_TOLERANCE = 1e-4


class ReconstructionError(Exception):
    """Numerical failure inside the filter/smoother, with diagnostics."""


@dataclass
class LdsModel:
    latent_dim: int
    F: np.ndarray  # (H, H) transition
    G: np.ndarray  # (N, H) projection
    Q: np.ndarray  # (H, H) process noise
    R_obs: np.ndarray  # (N, N) diagonal observation noise
    mu0: np.ndarray  # (H,)
    Q0: np.ndarray  # (H, H) initial covariance


@dataclass(frozen=True)
class EmOptions:
    max_iterations: int = 100
    loglik_rel_tolerance: float = 1e-4
    latent_dim: int | None = None  # None -> min(15, N)
    batch_slots: int | None = None  # None -> whole matrix in one batch

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.loglik_rel_tolerance <= 0:
            raise ValueError("loglik_rel_tolerance must be > 0")


@dataclass
class EStepResult:
    """Exact posterior moments of z_1..z_T plus the data log-likelihood."""

    means: np.ndarray  # (T, H) smoothed means
    covs: np.ndarray  # (T, H, H) smoothed covariances
    cross: np.ndarray  # (T-1, H, H) Cov(z_t, z_{t-1} | data), index t-1
    loglik: float


def _resolve_latent_dim(n_streams: int, opts: EmOptions) -> int:
    h = opts.latent_dim if opts.latent_dim is not None else min(15, n_streams)
    if h < 1:
        raise ValueError("latent_dim must be >= 1")
    if h > n_streams:
        warnings.warn(
            f"latent_dim {h} exceeds stream count {n_streams}", stacklevel=2
        )
    return h


def init_model(n_streams: int, opts: EmOptions, first_observation) -> LdsModel:
    """Identity dynamics with basis-vector projection columns scaled by
    the first observation's magnitudes; mu0 from least squares."""
    h = _resolve_latent_dim(n_streams, opts)
    first = np.asarray(first_observation, dtype=float)
    if first.shape != (n_streams,):
        raise ValueError("first_observation must have one value per stream")
    G = np.zeros((n_streams, h))
    for k in range(min(h, n_streams)):
        scale = first[k] if abs(first[k]) > 1e-12 else 1.0
        G[k, k] = scale
    mu0 = np.linalg.lstsq(G, first, rcond=None)[0]
    return LdsModel(
        latent_dim=h,
        F=np.eye(h),
        G=G,
        Q=np.eye(h),
        R_obs=np.eye(n_streams),
        mu0=mu0,
        Q0=np.eye(h),
    )


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def _psd_clip(a: np.ndarray) -> np.ndarray:
    """Project a symmetric matrix onto the PSD cone (clip negative eigs)."""
    w, v = np.linalg.eigh(_symmetrize(a))
    if w[0] >= 0.0:
        return _symmetrize(a)
    return _symmetrize((v * np.maximum(w, 0.0)) @ v.T)


def _chol(S: np.ndarray, where: str):
    """Cholesky with a single jitter retry; failure carries diagnostics."""
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        jitter = 1e-9 * max(float(np.max(np.diag(S))), 1.0)
        try:
            return np.linalg.cholesky(S + jitter * np.eye(S.shape[0]))
        except np.linalg.LinAlgError as exc:
            raise ReconstructionError(
                f"covariance not positive definite after regularization ({where})"
            ) from exc


def e_step(model: LdsModel, filled: np.ndarray) -> EStepResult:
    """Kalman filter + RTS smoother over a dense (N, T) matrix.

    Returns the exact posterior moments of the latent sequence and the
    log-likelihood of the filled data under the model.
    """
    filled = np.asarray(filled, dtype=float)
    if filled.ndim != 2:
        raise ValueError("filled must be an (N, T) matrix")
    n, T = filled.shape
    if T == 0:
        raise ValueError("zero-length series")
    if np.isnan(filled).any():
        raise ValueError("filled matrix must be dense")
    h = model.latent_dim
    F, G, Q, R = model.F, model.G, model.Q, model.R_obs

    mf = np.zeros((T, h))  # filtered means
    Vf = np.zeros((T, h, h))  # filtered covariances
    mp = np.zeros((T, h))  # one-step predicted means
    Vp = np.zeros((T, h, h))
    loglik = 0.0
    eye_h = np.eye(h)
    for t in range(T):
        if t == 0:
            mp[t] = model.mu0
            Vp[t] = model.Q0
        else:
            mp[t] = F @ mf[t - 1]
            Vp[t] = _symmetrize(F @ Vf[t - 1] @ F.T + Q)
        innov = filled[:, t] - G @ mp[t]
        S = _symmetrize(G @ Vp[t] @ G.T + R)
        L = _chol(S, f"innovation covariance at t={t}")
        alpha = np.linalg.solve(L, innov)
        loglik += -0.5 * (
            alpha @ alpha + 2.0 * np.log(np.diag(L)).sum() + n * np.log(2 * np.pi)
        )
        K = np.linalg.solve(L.T, np.linalg.solve(L, G @ Vp[t])).T
        mf[t] = mp[t] + K @ innov
        # Joseph form keeps the updated covariance PSD
        IKG = eye_h - K @ G
        Vf[t] = _symmetrize(IKG @ Vp[t] @ IKG.T + K @ R @ K.T)

    ms = np.zeros((T, h))
    Vs = np.zeros((T, h, h))
    cross = np.zeros((max(T - 1, 0), h, h))
    ms[-1] = mf[-1]
    Vs[-1] = Vf[-1]
    try:
        for t in range(T - 2, -1, -1):
            J = np.linalg.solve(Vp[t + 1].T, (Vf[t] @ F.T).T).T  # Vf F' Vp^{-1}
            ms[t] = mf[t] + J @ (ms[t + 1] - mp[t + 1])
            Vs[t] = _symmetrize(Vf[t] + J @ (Vs[t + 1] - Vp[t + 1]) @ J.T)
            cross[t] = Vs[t + 1] @ J.T  # Cov(z_{t+1}, z_t | all data)
    except np.linalg.LinAlgError as exc:
        raise ReconstructionError(
            f"predicted covariance singular in smoother at t={t}: {exc}"
        ) from exc
    return EStepResult(ms, Vs, cross, float(loglik))


def _solve_normal(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, bool]:
    """Solve X A = B for X; on singular A retry with ridge lambda=1e-8."""
    try:
        return np.linalg.solve(A.T, B.T).T, False
    except np.linalg.LinAlgError:
        ridged = A + _RIDGE * np.eye(A.shape[0])
        return np.linalg.solve(ridged.T, B.T).T, True


def m_step(
    stats: EStepResult, filled: np.ndarray, observed: np.ndarray | None = None
) -> LdsModel:
    """Closed-form maximizers of the expected complete-data log-likelihood.

    With an `observed` mask, the observation-noise diagonal is estimated
    from observed cells only. Filled-in cells equal the model's own
    estimate, so their residuals are self-consistent near-zeros; counting
    them deflates R for sparsely sampled streams until their stale fills
    act as near-exact observations and stop updating.
    """
    filled = np.asarray(filled, dtype=float)
    n, T = filled.shape
    means, covs, cross = stats.means, stats.covs, stats.cross
    h = means.shape[1]

    Ezz = covs + np.einsum("ti,tj->tij", means, means)  # E[z_t z_t']
    Szz = Ezz.sum(axis=0)
    Sxz = filled @ means  # sum_t x_t m_t'

    ridge_used = False
    if T > 1:
        Ezz1 = cross + np.einsum("ti,tj->tij", means[1:], means[:-1])
        S00 = Ezz[:-1].sum(axis=0)
        S10 = Ezz1.sum(axis=0)
        S11 = Ezz[1:].sum(axis=0)
        F, r1 = _solve_normal(S00, S10)
        # full residual form: PSD by construction even when F was ridged
        Q = _psd_clip(
            (S11 - F @ S10.T - S10 @ F.T + F @ S00 @ F.T) / (T - 1)
        )
        ridge_used |= r1
    else:
        F = np.eye(h)
        Q = np.eye(h)

    G, r2 = _solve_normal(Szz, Sxz)
    ridge_used |= r2
    if observed is None:
        resid = (
            (filled * filled).sum(axis=1)
            - 2.0 * np.einsum("ij,ij->i", G, Sxz)
            + np.einsum("ij,jk,ik->i", G, Szz, G)
        )
        r_diag = resid / T
    else:
        w = observed.astype(float)
        counts = w.sum(axis=1)
        if (counts < 1).any():
            raise ValueError("every stream needs at least one observed cell")
        Sxz_obs = (filled * w) @ means
        Szz_obs = np.einsum("it,thk->ihk", w, Ezz)
        resid = (
            (filled * filled * w).sum(axis=1)
            - 2.0 * np.einsum("ij,ij->i", G, Sxz_obs)
            + np.einsum("ih,ihk,ik->i", G, Szz_obs, G)
        )
        r_diag = resid / counts
    R = np.diag(np.maximum(r_diag, _R_FLOOR))

    mu0 = means[0].copy()
    Q0 = _psd_clip(covs[0])
    model = LdsModel(h, F, G, Q, R, mu0, Q0)
    model.ridge_applied = ridge_used  # diagnostics only
    return model


def _fit_block(values: np.ndarray, opts: EmOptions):
    """EM loop over one dense-masked block; returns filled data + trace."""
    n, T = values.shape
    missing = np.isnan(values)
    filled = np.stack([forward_fill(row) for row in values])
    model = init_model(n, opts, filled[:, 0])
    # slots with no observed stream at all are the only place where a
    # single refill per iteration can stall; see the loop comment below
    fill_passes = _MAX_FILL_PASSES if missing.all(axis=0).any() else 1

    trace: list[float] = []
    for iteration in range(1, opts.max_iterations + 1):
        stats = e_step(model, filled)
        trace.append(stats.loglik)
        if len(trace) >= 2:
            prev, cur = trace[-2], trace[-1]
            if abs(cur - prev) < opts.loglik_rel_tolerance * max(abs(prev), 1.0):
                break
        # Refilling missing cells with E[Gz | data] is an ascent step on
        # the likelihood under the current model, but only if the M-step
        # then uses posterior statistics of the refilled data; hence the
        # extra smoother pass after each refill. When the observation
        # noise has collapsed, a single refill barely moves cells in
        # slots where every stream is missing (the stale fill acts as a
        # near-exact pseudo-observation), so the refill is repeated
        # until it stabilizes.
        for _ in range(fill_passes):
            refreshed = np.where(missing, model.G @ stats.means.T, values)
            delta = float(np.max(np.abs(refreshed - filled), initial=0.0))
            filled = refreshed
            stats = e_step(model, filled)
            if delta < _FILL_TOLERANCE:
                break
        model = m_step(stats, filled, observed=~missing)
    return filled, trace, iteration


def reconstruct(sink_matrix: ReadingMatrix, opts: EmOptions = EmOptions()):
    """Replace every NaN cell with its model estimate.

    Present cells pass through unchanged. Returns the completed dense
    matrix, the log-likelihood trace, and the iteration count (summed
    over batches when batch_slots splits the matrix).
    """
    values = sink_matrix.values
    n, T = values.shape
    if T == 0:
        raise ValueError("zero-length matrix")

    # standardize per stream over observed cells
    means = np.zeros(n)
    stds = np.ones(n)
    for i in range(n):
        observed = values[i][~np.isnan(values[i])]
        if observed.size == 0:
            raise ValueError(f"stream {sink_matrix.streams[i]} has no observed values")
        means[i] = observed.mean()
        s = observed.std()
        stds[i] = s if s > 1e-12 else 1.0
    scaled = (values - means[:, None]) / stds[:, None]

    batch = opts.batch_slots if opts.batch_slots is not None else T
    completed = np.empty_like(scaled)
    trace: list[float] = []
    iterations = 0
    for lo in range(0, T, batch):
        block = scaled[:, lo : lo + batch]
        filled, block_trace, used = _fit_block(block, opts)
        completed[:, lo : lo + batch] = filled
        trace.extend(block_trace)
        iterations += used

    restored = completed * stds[:, None] + means[:, None]
    # observed-cell fidelity: bit-exact passthrough
    observed_mask = ~np.isnan(values)
    restored = np.where(observed_mask, values, restored)
    return sink_matrix.with_values(restored), trace, iterations
