"""Optional numba acceleration for the scalar kernels.

Set ``GRW_REAPERS_DISABLE_NUMBA=1`` to run every kernel as plain Python.
The flag is read once, at import time.
"""
import os

_DISABLED = os.environ.get("GRW_REAPERS_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    if _DISABLED:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
except ImportError:
    numba = None
    NUMBA_ENABLED = False


def jit(func):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(func)
    return func
