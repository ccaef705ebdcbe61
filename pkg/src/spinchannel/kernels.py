"""Hot numeric kernels: trajectory stepping and per-frequency solves.

Each kernel has a numba ``@njit`` implementation and a vectorized
pure-numpy fallback. ``SPINCHANNEL_NO_JIT=1`` selects the fallback; both
implementations stay importable so the benchmark can compare them.
"""

from __future__ import annotations

import numpy as np

from ._jit import JIT_ENABLED, njit, prange


@njit(cache=True, parallel=True)
def _em_second_moments_numba(a, b, noise, dt, n_burn, x0):
    n_traj, n_steps, dim = noise.shape
    out = np.zeros((n_traj, dim, dim))
    finals = np.zeros((n_traj, dim))
    sdt = np.sqrt(dt)
    for k in prange(n_traj):
        x = x0.copy()
        xn = np.empty(dim)
        acc = np.zeros((dim, dim))
        for t in range(n_steps):
            for r in range(dim):
                drift = 0.0
                kick = 0.0
                for c in range(dim):
                    drift += a[r, c] * x[c]
                    kick += b[r, c] * noise[k, t, c]
                xn[r] = x[r] + dt * drift + sdt * kick
            x, xn = xn, x
            if t >= n_burn:
                for r in range(dim):
                    for c in range(r + 1):
                        acc[r, c] += x[r] * x[c]
        norm = 1.0 / (n_steps - n_burn)
        for r in range(dim):
            for c in range(r + 1):
                out[k, r, c] = acc[r, c] * norm
                out[k, c, r] = acc[r, c] * norm
        finals[k] = x
    return out, finals


def _em_second_moments_numpy(a, b, noise, dt, n_burn, x0):
    n_traj, n_steps, dim = noise.shape
    x = np.broadcast_to(x0, (n_traj, dim)).copy()
    acc = np.zeros((n_traj, dim, dim))
    at = dt * a.T
    bt = np.sqrt(dt) * b.T
    for t in range(n_steps):
        x = x + x @ at + noise[:, t, :] @ bt
        if t >= n_burn:
            acc += x[:, :, None] * x[:, None, :]
    return acc / (n_steps - n_burn), x


def em_second_moments(a, b, noise, dt, n_burn, x0):
    """Euler-Maruyama integrate dx = A x dt + B dW per trajectory.

    ``noise`` holds standard-normal increments, shape (n_traj, n_steps, dim).
    Returns the (n_traj, dim, dim) time-averaged second moments over steps
    >= n_burn plus the final state of each trajectory. Trajectories are
    independent, so results do not depend on evaluation order.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    noise = np.ascontiguousarray(noise, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    if JIT_ENABLED:
        return _em_second_moments_numba(a, b, noise, float(dt), int(n_burn), x0)
    return _em_second_moments_numpy(a, b, noise, float(dt), int(n_burn), x0)


@njit(cache=True, parallel=True)
def _detected_psd_numba(a, b, c, omegas):
    dim = a.shape[0]
    n_obs = c.shape[0]
    out = np.empty((omegas.shape[0], n_obs))
    eye = np.eye(dim).astype(np.complex128)
    ac = a.astype(np.complex128)
    bc = b.astype(np.complex128)
    btc = b.T.astype(np.complex128)
    cc = c.astype(np.complex128)
    for f in prange(omegas.shape[0]):
        m = 1j * omegas[f] * eye - ac
        t = eye - np.dot(btc, np.linalg.solve(m, bc))
        g = np.dot(cc, t)
        for row in range(n_obs):
            s = 0.0
            for col in range(dim):
                s += g[row, col].real ** 2 + g[row, col].imag ** 2
            out[f, row] = s
    return out


def _detected_psd_numpy(a, b, c, omegas):
    dim = a.shape[0]
    eye = np.eye(dim)
    m = 1j * omegas[:, None, None] * eye - a          # (F, dim, dim)
    x = np.linalg.solve(m, np.broadcast_to(b + 0j, m.shape))
    t = eye - b.T @ x
    g = np.einsum("kd,fde->fke", c + 0j, t)
    return np.sum(g.real ** 2 + g.imag ** 2, axis=2)


def detected_psd(a, b, c, omegas):
    """Output-port PSD rows |C (I - B^T (i w I - A)^{-1} B)|^2 per frequency.

    The transfer matrix includes the reflected vacuum input, so a port of a
    purely passive network reads exactly 1 (the shot-noise floor) at every
    frequency.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    c = np.ascontiguousarray(np.atleast_2d(c), dtype=np.float64)
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    if JIT_ENABLED:
        return _detected_psd_numba(a, b, c, omegas)
    return _detected_psd_numpy(a, b, c, omegas)


@njit(cache=True, parallel=True)
def _mode_psd_numba(a, d, c, omegas):
    dim = a.shape[0]
    n_obs = c.shape[0]
    out = np.empty((omegas.shape[0], n_obs))
    eye = np.eye(dim).astype(np.complex128)
    atc = a.T.astype(np.complex128)
    dc = d.astype(np.complex128)
    ct = c.T.astype(np.complex128)
    for f in prange(omegas.shape[0]):
        m = atc - 1j * omegas[f] * eye
        u = np.linalg.solve(m, ct)                    # (dim, n_obs)
        du = np.dot(dc, u)
        for row in range(n_obs):
            s = 0.0
            for col in range(dim):
                s += (np.conj(u[col, row]) * du[col, row]).real
            out[f, row] = s
    return out


def _mode_psd_numpy(a, d, c, omegas):
    m = a.T - 1j * omegas[:, None, None] * np.eye(a.shape[0])
    u = np.linalg.solve(m, np.broadcast_to(c.T + 0j, (omegas.shape[0],) + c.T.shape))
    return np.einsum("fdk,de,fek->fk", u.conj(), d + 0j, u).real


def mode_psd(a, d, c, omegas):
    """Internal-mode PSD rows C (A + i w)^{-1} D (A^T - i w)^{-1} C^T per
    frequency; integrates (over w / 2 pi) to the steady-state variances."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    c = np.ascontiguousarray(np.atleast_2d(c), dtype=np.float64)
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    if JIT_ENABLED:
        return _mode_psd_numba(a, d, c, omegas)
    return _mode_psd_numpy(a, d, c, omegas)
