"""Backend dispatch for the hot numeric kernels.

Two implementations of the same kernels exist: a pure-numpy reference
(`kernels_numpy`) and numba @njit twins (`kernels_numba`). Selection is
controlled by the FLEXPOSE_BACKEND environment variable:

    FLEXPOSE_BACKEND=numba   force numba (error if unavailable)
    FLEXPOSE_BACKEND=numpy   force the numpy fallback
    unset / auto             numba if importable, else numpy

`set_backend` overrides the choice at runtime (used by the benchmark).
"""

import logging
import os

from . import kernels_numpy

logger = logging.getLogger(__name__)

_BACKENDS = {"numpy": kernels_numpy}
_active = "numpy"


def _try_load_numba():
    if "numba" in _BACKENDS:
        return True
    try:
        from . import kernels_numba
    except ImportError as exc:
        logger.warning("numba backend unavailable (%s); using numpy", exc)
        return False
    _BACKENDS["numba"] = kernels_numba
    return True


def set_backend(name):
    """Select the kernel backend ('numpy' or 'numba'). Returns the active name."""
    global _active
    if name == "numba":
        if not _try_load_numba():
            raise RuntimeError("numba backend requested but numba is not importable")
        _active = "numba"
    elif name == "numpy":
        _active = "numpy"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return _active


def active_backend():
    return _active


def kernels():
    """Module implementing the active backend's kernels."""
    return _BACKENDS[_active]


_requested = os.environ.get("FLEXPOSE_BACKEND", "auto").lower()
if _requested in ("auto", ""):
    if _try_load_numba():
        _active = "numba"
elif _requested in ("numpy", "numba"):
    set_backend(_requested)
else:
    raise RuntimeError(f"FLEXPOSE_BACKEND={_requested!r} not recognized (numpy|numba|auto)")
