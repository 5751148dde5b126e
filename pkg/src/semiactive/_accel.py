"""Numba switch for the physics kernels.

Set ``SEMIACTIVE_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. Both paths execute the same source, so results agree to libm
rounding.
"""

import os

NUMBA_DISABLED = os.environ.get("SEMIACTIVE_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not NUMBA_DISABLED


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    def wrap(f):
        if USE_NUMBA:
            return numba.njit(cache=True, **kwargs)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)
