"""JIT dispatch for the hot numeric kernels.

Numba compilation is on by default and can be switched off by setting the
environment variable ``SPINCHANNEL_NO_JIT=1`` (or if numba is not importable),
in which case the decorators below degrade to no-ops and the pure-numpy
fallback kernels are used. ``benchmarks/benchmark_kernels.py`` times the two
paths against each other.
"""

import os

JIT_ENABLED = os.environ.get("SPINCHANNEL_NO_JIT", "0") != "1"

if JIT_ENABLED:
    try:
        from numba import njit, prange
    except ImportError:
        JIT_ENABLED = False

if not JIT_ENABLED:

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper

    def prange(n):
        return range(n)
