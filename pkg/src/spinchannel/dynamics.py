"""Solvers for the linear stochastic model dx = A x dt + B dW.

Provides the steady-state covariance (continuous-time Lyapunov equation),
finite-time covariance propagation, frequency-domain noise spectra with the
shot-noise baseline convention, and an Euler-Maruyama trajectory ensemble
that serves as an independent statistical check on the Lyapunov solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .gaussian import Covariance
from .network import DriftDiffusion, hurwitz_check

RESIDUAL_RTOL = 1e-10


class InstabilityError(RuntimeError):
    """Raised when a steady state is requested for a non-Hurwitz drift."""

    def __init__(self, eigenvalue: complex):
        self.eigenvalue = complex(eigenvalue)
        super().__init__(
            f"drift matrix is not Hurwitz: eigenvalue {self.eigenvalue:.6g} "
            f"has non-negative real part {self.eigenvalue.real:.6g}"
        )


def _require_hurwitz(a: np.ndarray):
    rep = hurwitz_check(a)
    if not rep.ok:
        raise InstabilityError(rep.worst_eigenvalue)


def lyapunov_residual(dd: DriftDiffusion, sigma: np.ndarray) -> float:
    m = sigma.matrix if isinstance(sigma, Covariance) else np.asarray(sigma, dtype=float)
    return float(np.max(np.abs(dd.A @ m + m @ dd.A.T + dd.D)))


def steady_state_covariance(dd: DriftDiffusion) -> Covariance:
    """Solve A sigma + sigma A^T + D = 0 for the steady-state covariance.

    Requires a Hurwitz drift. The direct solution is polished by iterative
    refinement until the residual meets 1e-10 * max(1, max|D|); stiff rate
    ratios (detunings orders of magnitude above the decay rates) otherwise
    leave the plain solve a few ulps short of the bound.
    """
    _require_hurwitz(dd.A)
    sigma = scipy.linalg.solve_continuous_lyapunov(dd.A, -dd.D)
    sigma = 0.5 * (sigma + sigma.T)
    bound = RESIDUAL_RTOL * max(1.0, float(np.max(np.abs(dd.D))))
    res = lyapunov_residual(dd, sigma)
    for _ in range(3):
        if res <= bound:
            break
        r = dd.A @ sigma + sigma @ dd.A.T + dd.D
        delta = scipy.linalg.solve_continuous_lyapunov(dd.A, -0.5 * (r + r.T))
        sigma = sigma + 0.5 * (delta + delta.T)
        new_res = lyapunov_residual(dd, sigma)
        if new_res >= res:
            break
        res = new_res
    if res > bound:
        raise ArithmeticError(f"Lyapunov residual {res:.3e} exceeds bound {bound:.3e}")
    return Covariance(sigma)


def evolve_covariance(sigma0: Covariance, dd: DriftDiffusion, t: float) -> Covariance:
    """Propagate a covariance for time ``t``:
    sigma(t) = e^{At} sigma0 e^{A^T t} + integral of e^{As} D e^{A^T s} ds.

    Works for any drift (no stability assumption). The propagator and noise
    Gram matrix are built with a block-matrix exponential over a short base
    step and then doubled, which avoids the overflow the one-shot block
    exponential suffers from at large t * ||A||.
    """
    if t < 0:
        raise ValueError(f"evolution time must be >= 0, got {t}")
    if t == 0:
        return sigma0
    n = dd.A.shape[0]
    rho = float(np.max(np.abs(np.linalg.eigvals(dd.A)))) if np.any(dd.A) else 0.0
    doublings = max(0, int(np.ceil(np.log2(max(t * rho, 1.0)))))
    tau = t / (1 << doublings)
    blk = np.zeros((2 * n, 2 * n))
    blk[:n, :n] = dd.A
    blk[:n, n:] = dd.D
    blk[n:, n:] = -dd.A.T
    e = scipy.linalg.expm(blk * tau)
    prop = e[:n, :n]
    gram = e[:n, n:] @ prop.T
    for _ in range(doublings):
        gram = prop @ gram @ prop.T + gram
        prop = prop @ prop
    out = prop @ sigma0.matrix @ prop.T + gram
    return Covariance(0.5 * (out + out.T))


@dataclass(frozen=True)
class SpectrumResult:
    """Per-frequency PSD of a set of quadrature observables.

    ``db_rel_shot`` is 10 log10(psd) with the vacuum/shot-noise level at 1
    (so a bare vacuum port sits at 0 dB).
    """

    frequencies: np.ndarray          # (F,), rad/s, strictly increasing
    psd: np.ndarray                  # (F, K)
    observable_names: tuple[str, ...]

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        p = np.asarray(self.psd, dtype=float)
        if f.ndim != 1 or np.any(np.diff(f) <= 0):
            raise ValueError("frequency grid must be 1-D and strictly increasing")
        if p.shape != (f.size, len(self.observable_names)):
            raise ValueError(f"psd shape {p.shape} inconsistent with grid/names")
        if np.min(p) < -1e-12:
            raise ValueError(f"negative PSD value {np.min(p):.3e}")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "psd", np.maximum(p, 0.0))

    @property
    def db_rel_shot(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(np.maximum(self.psd, 1e-300))


def quadrature_row(n_modes: int, mode: int, quadrature: str = "x") -> np.ndarray:
    """Coefficient row selecting one quadrature of one mode."""
    row = np.zeros(2 * n_modes)
    row[2 * mode + (0 if quadrature == "x" else 1)] = 1.0
    return row


def joint_row(n_modes: int, i: int, j: int, sign: int = -1, quadrature: str = "x") -> np.ndarray:
    """Coefficient row for (q_i + sign * q_j)/sqrt(2)."""
    return (quadrature_row(n_modes, i, quadrature)
            + sign * quadrature_row(n_modes, j, quadrature)) / np.sqrt(2.0)


def _psd_sqrt(d: np.ndarray) -> np.ndarray:
    """Unique symmetric PSD square root (fixes the port convention of the
    detected spectra)."""
    w, v = np.linalg.eigh(d)
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.T


def noise_spectrum(dd: DriftDiffusion, observables, omegas, names=None,
                   detected: bool = True) -> SpectrumResult:
    """Noise power spectral density of quadrature observables.

    With ``detected=True`` (default) the observables read the output ports,
    including the reflected vacuum input, so any passive (all-BS) network
    sits exactly at the shot-noise floor: unit-norm rows give PSD 1, 0 dB.
    With ``detected=False`` the internal mode spectrum
    C (A + iw)^{-1} D (A^T - iw)^{-1} C^T is returned, whose integral over
    w/(2 pi) reproduces the steady-state variances.
    """
    _require_hurwitz(dd.A)
    rows = np.atleast_2d(np.asarray(observables, dtype=float))
    if rows.shape[1] != dd.A.shape[0]:
        raise ValueError(f"observable rows must have width {dd.A.shape[0]}, got {rows.shape[1]}")
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or not np.all(np.isfinite(omegas)):
        raise ValueError("frequency grid must be a 1-D finite array")
    if np.any(np.diff(omegas) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    if names is None:
        names = tuple(f"obs{k}" for k in range(rows.shape[0]))
    if detected:
        psd = kernels.detected_psd(dd.A, _psd_sqrt(dd.D), rows, omegas)
    else:
        psd = kernels.mode_psd(dd.A, dd.D, rows, omegas)
    return SpectrumResult(frequencies=omegas, psd=psd, observable_names=tuple(names))


def default_spectrum_grid(dd: DriftDiffusion, n_points: int = 4096,
                          span_factor: float = 40.0) -> np.ndarray:
    """Frequency grid covering the resonances of the drift: centered on the
    largest mode frequency with a half-span of ``span_factor`` times the
    fastest decay rate."""
    eig = np.linalg.eigvals(dd.A)
    center = float(np.max(np.abs(eig.imag)))
    half = span_factor * float(np.max(np.abs(eig.real)))
    return np.linspace(center - half, center + half, n_points)


@dataclass(frozen=True)
class TrajectoryEstimate:
    covariance: np.ndarray         # (2M, 2M) empirical second moments
    standard_errors: np.ndarray    # (2M, 2M) entrywise standard error
    final_mean: np.ndarray         # ensemble mean of x at the horizon
    n_traj: int
    dt: float
    n_steps: int


def _philox_noise(seed: int, first: int, count: int, n_steps: int, dim: int) -> np.ndarray:
    out = np.empty((count, n_steps, dim))
    for k in range(count):
        key = np.array([seed, first + k], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key))
        out[k] = gen.standard_normal((n_steps, dim))
    return out


def trajectory_ensemble(dd: DriftDiffusion, dt: float, horizon: float,
                        n_traj: int, seed: int, x0=None,
                        chunk: int = 256) -> TrajectoryEstimate:
    """Euler-Maruyama estimate of the stationary second moments.

    Integrates dx = A x dt + sqrt(D) dW per trajectory and averages the
    outer products over the second half of the horizon. Each trajectory
    draws from its own counter-based stream keyed by (seed, trajectory
    index), so the estimate is bit-reproducible and independent of
    evaluation order or chunking.
    """
    if n_traj < 100:
        raise ValueError(f"need at least 100 trajectories, got {n_traj}")
    rho = float(np.max(np.abs(np.linalg.eigvals(dd.A))))
    dt_max = 0.1 / rho if rho > 0 else np.inf
    if dt > dt_max:
        raise ValueError(
            f"step size {dt:.3e} is unstable for this drift; use dt <= {dt_max:.3e}"
        )
    n_steps = int(round(horizon / dt))
    if n_steps < 2:
        raise ValueError(f"horizon {horizon} spans fewer than 2 steps of {dt}")
    n_burn = n_steps // 2
    dim = dd.A.shape[0]
    if x0 is None:
        x0 = np.zeros(dim)
    x0 = np.asarray(x0, dtype=float)
    b = _psd_sqrt(dd.D)

    moments = np.empty((n_traj, dim, dim))
    finals = np.empty((n_traj, dim))
    for start in range(0, n_traj, chunk):
        count = min(chunk, n_traj - start)
        noise = _philox_noise(seed, start, count, n_steps, dim)
        mom, fin = kernels.em_second_moments(dd.A, b, noise, dt, n_burn, x0)
        moments[start:start + count] = mom
        finals[start:start + count] = fin

    cov = moments.mean(axis=0)
    se = moments.std(axis=0, ddof=1) / np.sqrt(n_traj)
    return TrajectoryEstimate(
        covariance=0.5 * (cov + cov.T),
        standard_errors=0.5 * (se + se.T),
        final_mean=finals.mean(axis=0),
        n_traj=n_traj,
        dt=dt,
        n_steps=n_steps,
    )
