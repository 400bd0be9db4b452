"""Numba availability and the backend switch.

Set ``HMFLAB_NUMBA=0`` before importing :mod:`hmflab` to run every hot
kernel through its pure-numpy implementation instead of the compiled one.
"""
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("HMFLAB_NUMBA", "1").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag not in ("0", "false", "no", "off")


def njit(func):
    """Compile ``func`` in nopython mode with on-disk caching.

    Returns ``func`` untouched when numba is missing, so the numba-flavoured
    source still imports (and runs, slowly) without it.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, fastmath=False)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
