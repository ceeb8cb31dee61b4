"""Derivations of (0,s) tensors by operator-valued 2-forms.

``(B.K)(X1, ..., Xs, X, Y) = -sum_j K(X1, ..., B(X,Y) Xj, ..., Xs)``; the two
argument slots ``(X, Y)`` are appended after the original ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PointFrame
from .tensors import RTOL, Tensor, close, max_abs

_LETTERS = "abcdefghijkl"


@dataclass(frozen=True)
class CurvOp:
    """``B(e_x, e_y) e_z = op[x, y, z, i] e_i``."""

    op: Tensor

    def __post_init__(self):
        if self.op.variance != ("l", "l", "l", "u"):
            raise ValueError("a curvature operator needs variance (l, l, l, u)")

    @classmethod
    def from_array(cls, data) -> "CurvOp":
        return cls(Tensor(data, ("l", "l", "l", "u")))

    @classmethod
    def from_covariant(cls, t04: Tensor, fr: PointFrame) -> "CurvOp":
        """Operator ``B(X,Y)Z`` with ``g(B(X,Y)Z, V) = t04(X,Y,Z,V)``."""
        return cls.from_array(np.einsum("xyzv,vi->xyzi", t04.data, fr.g_inv))

    @property
    def n(self) -> int:
        return self.op.n

    def skew(self, tol: float = RTOL) -> bool:
        return self.op.antisymmetric(0, 1, tol)


def _as_covariant(k: Tensor, fr: PointFrame | None) -> np.ndarray:
    if all(v == "l" for v in k.variance):
        return k.data
    if fr is None:
        raise ValueError("lowering a contravariant slot needs a frame")
    data = k.data
    for slot, v in enumerate(k.variance):
        if v == "u":
            data = np.moveaxis(np.tensordot(fr.g, data, axes=([1], [slot])), 0, slot)
    return data


def derive(b: CurvOp, k: Tensor, fr: PointFrame | None = None) -> Tensor:
    """``B.K`` as a (0, s+2) tensor; contravariant slots of ``K`` are lowered first."""
    s = k.rank
    if s < 1:
        raise ValueError("the derivation acts on tensors of rank at least 1")
    if k.n != b.n:
        raise ValueError("operator and tensor dimensions differ")
    kd = _as_covariant(k, fr)
    idx = _LETTERS[:s]
    out = np.zeros((b.n,) * (s + 2))
    for j in range(s):
        # K(..., B(X,Y) X_j, ...) = B[x, y, X_j, m] K[..., m, ...]
        src = idx[:j] + "m" + idx[j + 1:]
        out -= np.einsum(f"{src},xy{idx[j]}m->{idx}xy", kd, b.op.data)
    return Tensor.covariant(out)


def wedge_op(sigma: Tensor) -> CurvOp:
    """The field of endomorphisms ``(e_x ^_sigma e_y) Z = sigma(e_y, Z) e_x - sigma(e_x, Z) e_y``."""
    s = sigma.data
    n = s.shape[0]
    eye = np.eye(n)
    return CurvOp.from_array(np.einsum("yz,xi->xyzi", s, eye) - np.einsum("xz,yi->xyzi", s, eye))


def q_op(sigma: Tensor, k: Tensor, fr: PointFrame | None = None, tol: float = 1e-9) -> Tensor:
    """Tachibana tensor ``Q(sigma, K)``."""
    if sigma.rank != 2 or sigma.variance != ("l", "l"):
        raise ValueError("sigma must be a (0,2) tensor")
    if not close(sigma.data, sigma.data.T, rtol=tol, atol=tol * 1e-3):
        raise ValueError("sigma is not symmetric")
    return derive(wedge_op(sigma), k, fr)


def condition_residual(b: CurvOp, k: Tensor, sigma: Tensor, L: float,
                       fr: PointFrame | None = None) -> float:
    """``max |B.K - L Q(sigma, K)|`` over all components."""
    return max_abs(derive(b, k, fr).data - L * q_op(sigma, k, fr).data)


def curvature_op(fr: PointFrame) -> CurvOp:
    return CurvOp(fr.R13)
