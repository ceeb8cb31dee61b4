"""Dense tensors at a point in coordinate components.

Each slot carries a variance flag, ``"u"`` (contravariant) or ``"l"``
(covariant). Components are a numpy array of shape ``(n,) * rank``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RTOL = 1e-9
ATOL = 1e-12


def close(a, b, rtol: float = RTOL, atol: float = ATOL) -> bool:
    """Scaled comparison: ``max|a-b| <= rtol * max(|a|, |b|) + atol``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    return float(np.max(np.abs(a - b), initial=0.0)) <= rtol * scale + atol


def max_abs(a) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=float)), initial=0.0))


@dataclass(frozen=True, eq=False)
class Tensor:
    data: np.ndarray
    variance: tuple

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != len(self.variance):
            raise ValueError(f"rank {data.ndim} does not match variance {self.variance}")
        if data.ndim and len(set(data.shape)) != 1:
            raise ValueError(f"non-square component array {data.shape}")
        if any(v not in ("u", "l") for v in self.variance):
            raise ValueError(f"bad variance flags {self.variance}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "variance", tuple(self.variance))

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def n(self) -> int:
        return self.data.shape[0] if self.data.ndim else 0

    @classmethod
    def covariant(cls, data) -> "Tensor":
        data = np.asarray(data, dtype=float)
        return cls(data, ("l",) * data.ndim)

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.data + other.data, self.variance)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.data - other.data, self.variance)

    def __mul__(self, alpha: float) -> "Tensor":
        return Tensor(alpha * self.data, self.variance)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        return Tensor(-self.data, self.variance)

    def _check_compatible(self, other):
        if self.variance != other.variance or self.data.shape != other.data.shape:
            raise ValueError("tensors differ in shape or variance")

    def max_abs(self) -> float:
        return max_abs(self.data)

    def symmetric(self, i: int, j: int, tol: float = RTOL) -> bool:
        return close(self.data, np.swapaxes(self.data, i, j), rtol=tol)

    def antisymmetric(self, i: int, j: int, tol: float = RTOL) -> bool:
        return close(self.data, -np.swapaxes(self.data, i, j), rtol=tol)


@dataclass(frozen=True, eq=False)
class MetricPair:
    g: Tensor
    g_inv: Tensor
    signature: int

    @classmethod
    def from_matrix(cls, g) -> "MetricPair":
        g = np.asarray(g, dtype=float)
        if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, max_abs(g))):
            raise ValueError("metric is not symmetric")
        det = np.linalg.det(g)
        if abs(det) <= 1e-8:
            raise np.linalg.LinAlgError(f"degenerate metric (det = {det:.3g})")
        g = 0.5 * (g + g.T)
        g_inv = np.linalg.inv(g)
        g_inv = 0.5 * (g_inv + g_inv.T)
        signature = int(np.sum(np.linalg.eigvalsh(g) < 0))
        return cls(Tensor(g, ("l", "l")), Tensor(g_inv, ("u", "u")), signature)

    @property
    def n(self) -> int:
        return self.g.n


def _check_slots(t: Tensor, *slots):
    for s in slots:
        if not 0 <= s < t.rank:
            raise IndexError(f"slot {s} out of range for rank {t.rank}")
    if len(set(slots)) != len(slots):
        raise ValueError("the same slot was given twice")


def contract(t: Tensor, slot_a: int, slot_b: int, metric: MetricPair) -> Tensor:
    """Trace over two slots; two covariant slots use ``g_inv``, two contravariant use ``g``."""
    _check_slots(t, slot_a, slot_b)
    va, vb = t.variance[slot_a], t.variance[slot_b]
    data = np.moveaxis(t.data, (slot_a, slot_b), (0, 1))
    if va != vb:
        out = np.trace(data, axis1=0, axis2=1)
    else:
        m = metric.g_inv.data if va == "l" else metric.g.data
        out = np.tensordot(m, data, axes=([0, 1], [0, 1]))
    rest = tuple(v for i, v in enumerate(t.variance) if i not in (slot_a, slot_b))
    return Tensor(out, rest)


def _apply_on_slot(t: Tensor, slot: int, m: np.ndarray, flag: str) -> Tensor:
    out = np.moveaxis(np.tensordot(m, t.data, axes=([1], [slot])), 0, slot)
    variance = list(t.variance)
    variance[slot] = flag
    return Tensor(out, tuple(variance))


def raise_index(t: Tensor, slot: int, metric: MetricPair) -> Tensor:
    _check_slots(t, slot)
    if t.variance[slot] != "l":
        raise ValueError(f"slot {slot} is not covariant")
    return _apply_on_slot(t, slot, metric.g_inv.data, "u")


def lower_index(t: Tensor, slot: int, metric: MetricPair) -> Tensor:
    _check_slots(t, slot)
    if t.variance[slot] != "u":
        raise ValueError(f"slot {slot} is not contravariant")
    return _apply_on_slot(t, slot, metric.g.data, "l")


def wedge_sigma(x: Tensor, y: Tensor, sigma: Tensor) -> Tensor:
    """The endomorphism ``Z -> sigma(Y,Z) X - sigma(X,Z) Y`` as a (1,1) tensor ``A[i, z]``."""
    xv, yv, s = np.asarray(x.data), np.asarray(y.data), np.asarray(sigma.data)
    if not (xv.shape == yv.shape == s.shape[:1] and s.shape == (len(xv), len(xv))):
        raise ValueError("dimension mismatch in wedge")
    return Tensor(np.outer(xv, yv @ s) - np.outer(yv, xv @ s), ("u", "l"))


def vector(components) -> Tensor:
    return Tensor(np.asarray(components, dtype=float), ("u",))
