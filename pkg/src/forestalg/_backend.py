"""Kernel backend selection.

The compiled ``_kernels`` module is used when it imports; setting the
environment variable ``FORESTALG_PURE`` forces the pure-Python fallback.
"""
import os

from . import _pykernels

if os.environ.get("FORESTALG_PURE"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"

ClosureLimitExceeded = _pykernels.ClosureLimitExceeded
GEN, COMPOSE, ADD, MULT = _pykernels.GEN, _pykernels.COMPOSE, _pykernels.ADD, _pykernels.MULT
