"""Time the numba kernels against their pure-numpy fallbacks.

Run:  python benchmarks/benchmark_kernels.py
(the numba path needs SPINCHANNEL_NO_JIT unset; both implementations are
imported directly, so one process covers both)
"""

import time

import numpy as np

from spinchannel import ChannelConfig, ReservoirConfig, build_network, drift_diffusion
from spinchannel._jit import JIT_ENABLED
from spinchannel.dynamics import _philox_noise, _psd_sqrt, quadrature_row
from spinchannel.kernels import (
    _detected_psd_numba,
    _detected_psd_numpy,
    _em_second_moments_numba,
    _em_second_moments_numpy,
    _mode_psd_numba,
    _mode_psd_numpy,
)


def timeit(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if not JIT_ENABLED:
        raise SystemExit("numba is disabled (SPINCHANNEL_NO_JIT=1); nothing to compare")

    channels = [ChannelConfig(id=0, polarization="reversed", probe_on=False),
                ChannelConfig(id=1, probe_on=False), ChannelConfig(id=2, probe_on=False)]
    dd = drift_diffusion(build_network(channels, ReservoirConfig()))
    dim = dd.A.shape[0]
    b = _psd_sqrt(dd.D)

    n_traj, n_steps = 256, 4000
    dt = 1e-4
    noise = _philox_noise(0, 0, n_traj, n_steps, dim)
    x0 = np.zeros(dim)
    args = (dd.A, b, noise, dt, n_steps // 2, x0)
    _em_second_moments_numba(*args)  # compile before timing

    rows = np.vstack([quadrature_row(dim // 2, k, "x") for k in range(3)])
    omegas = np.linspace(-2000.0, 2000.0, 4096)
    spec_args = (dd.A, b, rows, omegas)
    mode_args = (dd.A, dd.D, rows, omegas)
    _detected_psd_numba(*spec_args)
    _mode_psd_numba(*mode_args)

    print(f"network: {dim // 2} modes; ensemble {n_traj} x {n_steps} steps; "
          f"spectra on {omegas.size} frequencies")
    print(f"{'kernel':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, fast, slow in [
        ("euler-maruyama", lambda: _em_second_moments_numba(*args),
         lambda: _em_second_moments_numpy(*args)),
        ("detected spectrum", lambda: _detected_psd_numba(*spec_args),
         lambda: _detected_psd_numpy(*spec_args)),
        ("mode spectrum", lambda: _mode_psd_numba(*mode_args),
         lambda: _mode_psd_numpy(*mode_args)),
    ]:
        t_fast = timeit(fast)
        t_slow = timeit(slow)
        print(f"{name:<22}{t_fast:>12.4f}{t_slow:>12.4f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
