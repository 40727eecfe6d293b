"""Kernel backend selection.

The compiled extension is preferred when it imports cleanly; the pure-numpy
fallback is always available.  Set ``DNLRL_KERNELS=python`` to force the
fallback or ``DNLRL_KERNELS=cython`` to require the extension.
"""

import os

from . import numpy_backend

_requested = os.environ.get("DNLRL_KERNELS", "auto").lower()

if _requested not in ("auto", "cython", "python"):
    raise ValueError(f"DNLRL_KERNELS must be auto, cython or python, got {_requested!r}")

if _requested in ("auto", "cython"):
    try:
        from . import _fastcore as _impl
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = numpy_backend
        BACKEND = "python"
else:
    _impl = numpy_backend
    BACKEND = "python"

conj_forward = _impl.conj_forward
conj_backward = _impl.conj_backward
disj_forward = _impl.disj_forward
disj_backward = _impl.disj_backward


def backend_name() -> str:
    return BACKEND
