"""Kernel selection: the compiled tape interpreter when built, else pure Python.

Set ``NULLITY_FORGE_PURE=1`` to force the Python path.
"""

import os

import numpy as np

from . import _jetpy
from .expr import ExprDomainError, Tape

try:
    if os.environ.get("NULLITY_FORGE_PURE"):
        raise ImportError("pure-Python kernels requested")
    from . import _jetcore as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_hessian = _compiled.hessian if _compiled is not None else _jetpy.hessian


def tape_hessian(tape: Tape, point, backend: str | None = None):
    """Value, gradient and Hessian of a compiled expression at ``point``."""
    if backend is None:
        fn = _hessian
    elif backend == "python":
        fn = _jetpy.hessian
    elif backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        fn = _compiled.hessian
    else:
        raise ValueError(f"unknown backend {backend!r}")
    status, value, grad, hess = fn(tape.ops, tape.args, tape.consts,
                                   np.asarray(point, dtype=np.float64), tape.depth)
    if status >= 0:
        raise ExprDomainError("domain error", tape.describe(status))
    return value, grad, hess
