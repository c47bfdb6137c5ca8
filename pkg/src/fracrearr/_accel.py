"""Backend selection for the numeric kernels.

Kernels are compiled with numba when it is importable and the environment
variable ``FRACREARR_DISABLE_NUMBA`` is unset (or set to ``0``).  Otherwise the
pure-numpy implementations in :mod:`fracrearr.kernels` are used.
"""

from __future__ import annotations

import os

_FLAG = "FRACREARR_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(_FLAG, "0").strip().lower() in ("", "0", "false", "no")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def wrap(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return wrap


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
