"""Numba switch for the hot kernels.

Set ``QBOUNDS_NUMBA=0`` in the environment before import to run every
kernel as plain numpy code. The numba path is used otherwise, provided
numba imports cleanly.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("QBOUNDS_NUMBA", "1") != "0"


def maybe_njit(fn):
    """Compile ``fn`` with ``numba.njit`` when acceleration is on."""
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
