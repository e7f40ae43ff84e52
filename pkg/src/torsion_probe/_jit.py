"""Numba dispatch: hot kernels compile with @njit when available and wanted.

Every accelerated kernel in the package has a pure-numpy twin.  Selection
happens once, at import time:

  * numba importable and TORSION_PROBE_JIT unset or "1"  -> compiled kernels
  * TORSION_PROBE_JIT=0, or numba missing                -> numpy fallbacks

`benchmarks/bench_jit.py` imports both twins directly and times them against
each other, so the fallback path stays honest.
"""

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via TORSION_PROBE_JIT=0
    numba = None
    HAS_NUMBA = False

JIT_ENABLED = HAS_NUMBA and os.environ.get("TORSION_PROBE_JIT", "1") != "0"

# parallel range for compiled kernels; plain range keeps the fallback valid
prange = numba.prange if JIT_ENABLED else range


def njit(*args, **kwargs):
    """numba.njit when JIT is on; identity decorator otherwise.

    The decorated source must therefore be valid plain Python, but callers
    should still prefer the numpy twin when JIT_ENABLED is False: an
    un-compiled kernel loop is correct yet slow.
    """
    if JIT_ENABLED:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]

    def wrap(func):
        return func

    return wrap


def select(jit_impl, numpy_impl):
    """Pick the active implementation for a kernel pair."""
    return jit_impl if JIT_ENABLED else numpy_impl
