"""The eight-parameter T-curvature family and its named presets.

For a coefficient vector ``c = (a0, ..., a7)`` the (0,4) tensor is

    T(X,Y,Z,V) = a0 R(X,Y,Z,V) + a1 S(Y,Z) g(X,V) + a2 S(X,Z) g(Y,V)
               + a3 S(X,Y) g(Z,V) + a4 S(X,V) g(Y,Z) + a5 S(Y,V) g(X,Z)
               + a6 S(Z,V) g(X,Y) + a7 r (g(Y,Z) g(X,V) - g(X,Z) g(Y,V))

and its (1,3) form ``T(X,Y)Z`` is obtained by raising the last slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import PointFrame
from .tensors import Tensor


@dataclass(frozen=True)
class CoeffVector:
    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0
    a5: float = 0.0
    a6: float = 0.0
    a7: float = 0.0

    def __post_init__(self):
        for name, v in zip(self.names(), self.as_tuple()):
            if not math.isfinite(v):
                raise ValueError(f"coefficient {name} is not finite")
            object.__setattr__(self, name, float(v))

    @staticmethod
    def names():
        return ("a0", "a1", "a2", "a3", "a4", "a5", "a6", "a7")

    def as_tuple(self) -> tuple:
        return (self.a0, self.a1, self.a2, self.a3, self.a4, self.a5, self.a6, self.a7)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    @classmethod
    def from_sequence(cls, values) -> "CoeffVector":
        values = tuple(float(v) for v in values)
        if len(values) != 8:
            raise ValueError("a coefficient vector has exactly eight entries")
        return cls(*values)

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        return CoeffVector.from_sequence(self.as_array() + other.as_array())

    def __mul__(self, lam: float) -> "CoeffVector":
        return CoeffVector.from_sequence(lam * self.as_array())

    __rmul__ = __mul__


class Preset(Enum):
    R = "r"
    QUASI_CONFORMAL = "quasi-conformal"
    CONFORMAL = "conformal"
    CONHARMONIC = "conharmonic"
    CONCIRCULAR = "concircular"
    PSEUDO_PROJECTIVE = "pseudo-projective"
    PROJECTIVE = "projective"
    M_PROJECTIVE = "m-projective"
    W0 = "w0"
    W0_STAR = "w0star"
    W1 = "w1"
    W1_STAR = "w1star"
    W2 = "w2"
    W3 = "w3"
    W4 = "w4"
    W5 = "w5"
    W6 = "w6"
    W7 = "w7"
    W8 = "w8"
    W9 = "w9"
    CUSTOM = "custom"

    @classmethod
    def from_name(cls, name: str) -> "Preset":
        try:
            return cls(name.lower())
        except ValueError:
            known = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown preset {name!r}; known: {known}") from None

    @property
    def parametric(self) -> bool:
        return self in (Preset.QUASI_CONFORMAL, Preset.PSEUDO_PROJECTIVE)


PRESETS = tuple(p for p in Preset if p is not Preset.CUSTOM)

# the presets of the pseudosymmetry dichotomy corollary
TPS_PRESETS = (Preset.R, Preset.CONCIRCULAR, Preset.PROJECTIVE, Preset.M_PROJECTIVE,
               Preset.W0, Preset.W0_STAR, Preset.W1, Preset.W1_STAR, Preset.W3,
               Preset.W4, Preset.W5, Preset.W6, Preset.W7, Preset.W8)

# free parameters used when a parametric preset is requested without them
DEFAULT_FREE = {Preset.QUASI_CONFORMAL: (1.0, -0.5), Preset.PSEUDO_PROJECTIVE: (1.0, -0.5)}


def _fixed(n: int) -> dict:
    m = 1.0 / (n - 1)
    return {
        Preset.R: dict(a0=1.0),
        Preset.CONFORMAL: dict(a0=1.0, a1=-1 / (n - 2), a2=1 / (n - 2), a4=-1 / (n - 2),
                               a5=1 / (n - 2), a7=1 / ((n - 1) * (n - 2))),
        Preset.CONHARMONIC: dict(a0=1.0, a1=-1 / (n - 2), a2=1 / (n - 2), a4=-1 / (n - 2),
                                 a5=1 / (n - 2)),
        Preset.CONCIRCULAR: dict(a0=1.0, a7=-1 / (n * (n - 1))),
        Preset.PROJECTIVE: dict(a0=1.0, a1=-m, a2=m),
        Preset.M_PROJECTIVE: dict(a0=1.0, a1=-m / 2, a2=m / 2, a4=-m / 2, a5=m / 2),
        Preset.W0: dict(a0=1.0, a1=-m, a5=m),
        Preset.W0_STAR: dict(a0=1.0, a1=m, a5=-m),
        Preset.W1: dict(a0=1.0, a1=m, a2=-m),
        Preset.W1_STAR: dict(a0=1.0, a1=-m, a2=m),
        Preset.W2: dict(a0=1.0, a4=-m, a5=m),
        Preset.W3: dict(a0=1.0, a2=-m, a4=m),
        Preset.W4: dict(a0=1.0, a5=m, a6=-m),
        Preset.W5: dict(a0=1.0, a2=-m, a5=m),
        Preset.W6: dict(a0=1.0, a1=-m, a6=m),
        Preset.W7: dict(a0=1.0, a1=-m, a4=m),
        Preset.W8: dict(a0=1.0, a1=-m, a3=m),
        Preset.W9: dict(a0=1.0, a3=m, a4=-m),
    }


def coefficients(preset, n: int, a0: float | None = None, a1: float | None = None,
                 custom=None) -> CoeffVector:
    """Coefficient vector of ``preset`` in dimension ``n``.

    ``a0`` and ``a1`` are required for the quasi-conformal and pseudo-projective
    presets and ignored otherwise; ``custom`` supplies all eight values for
    ``Preset.CUSTOM``.
    """
    if isinstance(preset, str):
        preset = Preset.from_name(preset)
    if n < 3:
        raise ValueError(f"presets need n >= 3, got n = {n}")
    if preset is Preset.CUSTOM:
        if custom is None:
            raise ValueError("custom preset needs eight coefficients")
        return CoeffVector.from_sequence(custom)
    if preset.parametric:
        if a0 is None or a1 is None:
            raise ValueError(f"{preset.value} needs the free parameters a0 and a1")
        if preset is Preset.QUASI_CONFORMAL:
            return CoeffVector(a0=a0, a1=a1, a2=-a1, a4=a1, a5=-a1,
                               a7=-(a0 / (n - 1) + 2 * a1) / n)
        return CoeffVector(a0=a0, a1=a1, a2=-a1, a7=-(a0 / (n - 1) + a1) / n)
    return CoeffVector(**_fixed(n)[preset])


def preset_coefficients(preset, n: int) -> CoeffVector:
    """Like :func:`coefficients` but fills parametric presets with ``DEFAULT_FREE``."""
    if isinstance(preset, str):
        preset = Preset.from_name(preset)
    if preset.parametric:
        return coefficients(preset, n, *DEFAULT_FREE[preset])
    return coefficients(preset, n)


def build_T(fr: PointFrame, c: CoeffVector) -> Tensor:
    """The (0,4) T-curvature tensor of ``c`` at a frame."""
    if fr.R04.n != fr.n or fr.S.n != fr.n:
        raise ValueError("frame tensors disagree on the dimension")
    g, s, r = fr.g, fr.S.data, fr.r
    ein = np.einsum
    t = (c.a0 * fr.R04.data
         + c.a1 * ein("yz,xv->xyzv", s, g)
         + c.a2 * ein("xz,yv->xyzv", s, g)
         + c.a3 * ein("xy,zv->xyzv", s, g)
         + c.a4 * ein("xv,yz->xyzv", s, g)
         + c.a5 * ein("yv,xz->xyzv", s, g)
         + c.a6 * ein("zv,xy->xyzv", s, g)
         + c.a7 * r * (ein("yz,xv->xyzv", g, g) - ein("xz,yv->xyzv", g, g)))
    return Tensor.covariant(t)


def operator_form(fr: PointFrame, t04: Tensor) -> Tensor:
    """``T(X,Y)Z`` components ``[x, y, z, i]``: the last slot raised."""
    return Tensor(np.einsum("xyzv,vi->xyzi", t04.data, fr.g_inv), ("l", "l", "l", "u"))


def ricci_of_T(fr: PointFrame, c: CoeffVector) -> Tensor:
    """``S_T(Y,Z) = g^{iv} T(e_i, Y, Z, e_v)``."""
    return Tensor.covariant(np.einsum("iv,iyzv->yz", fr.g_inv, build_T(fr, c).data))


def ricci_of_T_closed(fr: PointFrame, c: CoeffVector) -> Tensor:
    """The same contraction written through ``S``, ``r`` and ``g`` only."""
    n = fr.n
    alpha = c.a0 + n * c.a1 + c.a2 + c.a3 + c.a5 + c.a6
    beta = c.a4 + (n - 1) * c.a7
    return Tensor.covariant(alpha * fr.S.data + beta * fr.r * fr.g)
