"""Numba toggle shared by the hot kernels.

Set ``S3DECOMP_DISABLE_NUMBA=1`` to force the pure-numpy/Python fallbacks.
The flag is read once at import time.
"""
import os

_disabled = os.environ.get("S3DECOMP_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    import numba

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False


def njit(func):
    """``numba.njit(cache=True)`` when acceleration is on, else return ``func`` unchanged."""
    if HAS_NUMBA:
        return numba.njit(cache=True)(func)
    return func
