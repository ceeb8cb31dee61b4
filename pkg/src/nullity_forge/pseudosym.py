"""Pseudosymmetry conditions: fitting L, Einstein-type classification, theorem checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .derive import CurvOp, curvature_op, derive, q_op
from .family import CoeffVector, Preset, build_T, coefficients, operator_form, ricci_of_T
from .geometry import PointFrame
from .tensors import Tensor, max_abs

KINDS = ("TT-g", "TT-Sl", "T-RicciT-g", "T-RicciT-Sl")
DEGENERACY_FLOOR = 1e-10


@dataclass(frozen=True)
class ConditionSpec:
    """``T_a . K = L Q(sigma, K)`` with ``K`` either ``T_b`` or ``S_{T_b}``."""

    kind: str
    ta: CoeffVector
    tb: CoeffVector
    ell: int = 0
    ta_name: str = "custom"
    tb_name: str = "custom"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown condition kind {self.kind!r}; known: {', '.join(KINDS)}")
        if self.ell < 0:
            raise ValueError("ell must be non-negative")
        if self.kind.endswith("-g") and self.ell != 0:
            raise ValueError("metric kinds have ell = 0")

    @classmethod
    def from_presets(cls, kind: str, ta, tb, n: int, ell: int = 0,
                     free: tuple | None = None) -> "ConditionSpec":
        """Build from preset names; ``free`` = (a0, a1) for the parametric presets."""
        def coeffs(p):
            p = Preset.from_name(p) if isinstance(p, str) else p
            if p.parametric:
                return coefficients(p, n, *(free or (1.0, -0.5)))
            return coefficients(p, n)
        ta_p = Preset.from_name(ta) if isinstance(ta, str) else ta
        tb_p = Preset.from_name(tb) if isinstance(tb, str) else tb
        return cls(kind, coeffs(ta_p), coeffs(tb_p), ell, ta_p.value, tb_p.value)

    @property
    def ricci_kind(self) -> bool:
        return self.kind.startswith("T-RicciT")

    @property
    def sigma_ell(self) -> int:
        return self.ell if self.kind.endswith("Sl") else 0

    def label(self) -> str:
        sig = "g" if self.sigma_ell == 0 else f"S^{self.sigma_ell}"
        k = f"S_{self.tb_name}" if self.ricci_kind else self.tb_name
        return f"{self.ta_name}.{k}=L*Q({sig},{k})"


@dataclass(frozen=True)
class FitReport:
    L: float | None
    residual: float
    degenerate: bool
    point: tuple
    lhs_norm: float = 0.0
    rhs_norm: float = 0.0

    def as_dict(self) -> dict:
        return {"L": self.L, "residual": self.residual, "degenerate": self.degenerate,
                "point": list(self.point), "lhs_norm": self.lhs_norm, "rhs_norm": self.rhs_norm}


@dataclass(frozen=True)
class ClassificationReport:
    einstein_residual: float
    r: float
    alpha: float | None = None
    beta: float | None = None
    eta_einstein_residual: float | None = None
    kn_einstein_residual: float | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _parts(cond: ConditionSpec, fr: PointFrame):
    b = CurvOp.from_covariant(build_T(fr, cond.ta), fr)
    k = ricci_of_T(fr, cond.tb) if cond.ricci_kind else build_T(fr, cond.tb)
    sigma = fr.ricci_power(cond.sigma_ell)
    return b, k, sigma


def fit_from_arrays(lhs, rhs, point=(), floor: float = DEGENERACY_FLOOR) -> FitReport:
    """Least-squares ``L`` in ``lhs = L rhs``."""
    lhs = np.asarray(lhs, dtype=float).ravel()
    rhs = np.asarray(rhs, dtype=float).ravel()
    ln, rn = max_abs(lhs), max_abs(rhs)
    pt = tuple(float(x) for x in point)
    if ln < floor and rn < floor:
        return FitReport(None, ln, True, pt, ln, rn)
    if rn < floor:
        return FitReport(None, ln, False, pt, ln, rn)
    L = float(np.dot(lhs, rhs) / np.dot(rhs, rhs))
    return FitReport(L, max_abs(lhs - L * rhs), False, pt, ln, rn)


def fit_L(cond: ConditionSpec, fr: PointFrame) -> FitReport:
    b, k, sigma = _parts(cond, fr)
    return fit_from_arrays(derive(b, k, fr).data, q_op(sigma, k, fr).data, fr.point)


def summarize_fits(reports) -> dict:
    """Mean ``L`` and its spread over points, plus residual and degeneracy counts."""
    ls = [r.L for r in reports if r.L is not None]
    mean = float(np.mean(ls)) if ls else None
    return {
        "points": len(reports),
        "mean_L": mean,
        "max_deviation": float(max(abs(x - mean) for x in ls)) if ls else None,
        "max_residual": float(max((r.residual for r in reports), default=0.0)),
        "degenerate": sum(r.degenerate for r in reports),
        "undetermined": sum(r.L is None and not r.degenerate for r in reports),
    }


def classify(fr: PointFrame) -> ClassificationReport:
    n, g, s, r = fr.n, fr.g, fr.S.data, fr.r
    out = dict(einstein_residual=max_abs(s - (r / n) * g), r=float(r))
    if fr.eta is not None:
        basis = np.stack([g.ravel(), np.outer(fr.eta, fr.eta).ravel()], axis=1)
        (alpha, beta), *_ = np.linalg.lstsq(basis, s.ravel(), rcond=None)
        out.update(alpha=float(alpha), beta=float(beta),
                   eta_einstein_residual=max_abs(basis @ [alpha, beta] - s.ravel()))
    if fr.k is not None:
        out["kn_einstein_residual"] = max_abs(s - fr.k * (n - 1) * g)
    return ClassificationReport(**out)


# -- the xi-projected master identity -------------------------------------------------

def unit_direction(fr: PointFrame):
    """``(xi, eta, eps)`` of the frame, or a unit coordinate direction when it has none."""
    if fr.xi is not None:
        return fr.xi, fr.eta, fr.eps
    g = fr.g
    i = int(np.argmax(np.abs(np.diag(g))))
    eps = 1 if g[i, i] > 0 else -1
    xi = np.zeros(fr.n)
    xi[i] = 1.0 / math.sqrt(abs(g[i, i]))
    return xi, eps * (g @ xi), eps


def _projected4(bx, tb04, tb_op, xi, g, mixed: bool):
    """``(B_X . T_b)(U, V, W, xi)`` with ``bx[x, z, i] = (B_X e_z)^i``.

    ``mixed=True`` differentiates the (1,3) tensor and then pairs with ``xi``;
    otherwise the (0,4) tensor is differentiated with ``xi`` in the last slot.
    """
    ein = np.einsum
    t_xi = ein("uvwj,j->uvw", tb04, xi)
    out = -(ein("xui,ivw->uvwx", bx, t_xi) + ein("xvi,uiw->uvwx", bx, t_xi)
            + ein("xwi,uvi->uvwx", bx, t_xi))
    if mixed:
        out += ein("uvwm,xmi,ij,j->uvwx", tb_op, bx, g, xi)
    else:
        out -= ein("uvwi,xi->uvwx", tb04, ein("xzi,z->xi", bx, xi))
    return out


def _projected2(bx, k, xi):
    """``(B_Y . K)(U, xi)`` for a (0,2) tensor, result ``[u, y]``."""
    ein = np.einsum
    return -(ein("yui,ij,j->uy", bx, k, xi) + ein("ui,yi->uy", k, ein("yzi,z->yi", bx, xi)))


def _wedge_at_xi(sigma, xi):
    """``W[x, y, i]`` for ``(xi ^_sigma e_x) e_y = sigma(e_x, e_y) xi - sigma(xi, e_y) e_x``."""
    n = len(xi)
    return np.einsum("xy,i->xyi", sigma, xi) - np.einsum("y,xi->xyi", xi @ sigma, np.eye(n))


def master_identity_sides(cond: ConditionSpec, fr: PointFrame, mixed: bool = False):
    """Both sides of the condition with its first argument pair set to ``(xi, X)``
    and, for four-slot tensors, the value paired with ``xi``.

    Written out by explicit contraction, not through :mod:`derive`.
    """
    xi, _, _ = unit_direction(fr)
    ta_op = operator_form(fr, build_T(fr, cond.ta)).data
    bx = np.einsum("w,wxzi->xzi", xi, ta_op)
    wx = _wedge_at_xi(fr.ricci_power(cond.sigma_ell).data, xi)
    if cond.ricci_kind:
        k = ricci_of_T(fr, cond.tb).data
        return _projected2(bx, k, xi), _projected2(wx, k, xi)
    tb04 = build_T(fr, cond.tb)
    tb_op = operator_form(fr, tb04).data
    return (_projected4(bx, tb04.data, tb_op, xi, fr.g, mixed),
            _projected4(wx, tb04.data, tb_op, xi, fr.g, mixed))


def master_identity_check(cond: ConditionSpec, fr: PointFrame, L: float,
                          mixed: bool = False) -> float:
    """``max |lhs - L rhs|`` of the xi-projected identity."""
    lhs, rhs = master_identity_sides(cond, fr, mixed)
    return max_abs(lhs - L * rhs)


# -- dichotomy theorem ----------------------------------------------------------------

@dataclass(frozen=True)
class DichotomyVerdict:
    verdict: str  # einstein | l-branch | eta-einstein | violation | precondition-failed
    case: int
    einstein_residual: float
    l_gap: float | None
    eta_einstein_residual: float | None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def dichotomy_check(fr: PointFrame, c: CoeffVector, L: float | None,
                    tol: float = 1e-8) -> DichotomyVerdict:
    """Which branch of the pseudosymmetry dichotomy a frame realizes."""
    n = fr.n
    if fr.k is None:
        raise ValueError("the dichotomy needs a frame with declared k")
    if abs(c.a0 + c.a5 + c.a6) < 1e-12:
        return DichotomyVerdict("precondition-failed", 0, math.nan, None, None)
    case = 1 if abs(c.a0 + c.a2 + c.a3 + n * c.a4 + c.a5 + c.a6) > 1e-12 else 2
    scale = max(1.0, max_abs(fr.S.data))
    cl = classify(fr)
    ein = cl.kn_einstein_residual
    gap = None if L is None else abs(L - fr.k)
    if ein <= tol * scale:
        verdict = "einstein"
    elif gap is not None and gap <= tol * max(1.0, abs(fr.k)):
        verdict = "l-branch"
    elif case == 2 and cl.eta_einstein_residual is not None and cl.eta_einstein_residual <= tol * scale:
        verdict = "eta-einstein"
    else:
        verdict = "violation"
    return DichotomyVerdict(verdict, case, ein, gap, cl.eta_einstein_residual)


def perturbed(fr: PointFrame, delta: np.ndarray) -> PointFrame:
    """A copy of ``fr`` with ``delta`` added to the Ricci tensor (negative controls)."""
    s = fr.S.data + delta
    q = fr.g_inv @ s
    return replace(fr, S=Tensor.covariant(s), Q=Tensor(q, ("u", "l")), r=float(np.trace(q)),
                   ricci_powers={0: fr.ricci_powers[0]})


# -- (R, R, S^l) corollary --------------------------------------------------------------

@dataclass(frozen=True)
class CorollaryReport:
    applicable: bool
    reason: str
    ell: int
    fitted_L: float | None = None
    predicted_L: float | None = None
    l_gap: float | None = None
    einstein_residual: float | None = None
    holds: bool | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def rrsl_corollary_check(fr: PointFrame, ell: int, tol: float = 1e-8) -> CorollaryReport:
    """Test ``S^l = k^l (n-1)^l g`` and ``L = 1/(k^(l-1) (n-1)^l)`` at one frame."""
    if ell < 1:
        raise ValueError("ell must be positive")
    n, k = fr.n, fr.k
    if k is None or k == 0:
        return CorollaryReport(False, "needs k != 0", ell)
    rr = derive(curvature_op(fr), fr.R04, fr)
    if rr.max_abs() < DEGENERACY_FLOOR:
        return CorollaryReport(False, "semisymmetric", ell)
    cond = ConditionSpec("TT-Sl", CoeffVector(a0=1.0), CoeffVector(a0=1.0), ell, "r", "r")
    rep = fit_L(cond, fr)
    pred = 1.0 / (k ** (ell - 1) * (n - 1) ** ell)
    sl = fr.ricci_power(ell).data
    ein = max_abs(sl - (k * (n - 1)) ** ell * fr.g)
    gap = None if rep.L is None else abs(rep.L - pred)
    holds = gap is not None and gap <= tol * max(1.0, abs(pred)) and ein <= tol * max(1.0, max_abs(sl))
    return CorollaryReport(True, "", ell, rep.L, pred, gap, ein, holds)


# -- (T_a, S)-pseudosymmetry constants ----------------------------------------------------

@dataclass(frozen=True)
class RicciConstants:
    E: float
    F: float
    G: float
    closed_form_residual: float
    theorem_residual: float | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def ricci_condition_constants(fr: PointFrame, c: CoeffVector, L: float | None = None) -> RicciConstants:
    """Constants ``E, F, G`` of the (T_a, S) condition.

    ``closed_form_residual`` compares ``S(T_a(xi,Y)U, xi) + S(U, T_a(xi,Y)xi)``,
    computed from ``build_T``, with ``eps a5 S^2 - E S - F g - G eta x eta``.
    With ``L`` given, ``theorem_residual`` measures the theorem's equation
    with the left side evaluated directly.
    """
    if fr.xi is None:
        raise ValueError("frame has no (xi, eps, k) data")
    n, e, k, r = fr.n, fr.eps, fr.k, fr.r
    g, s, eta, xi = fr.g, fr.S.data, fr.eta, fr.xi
    a0, a1, a2, a3, a4, a5, a6, a7 = c.as_tuple()
    E = e * (k * a0 + a7 * r - k * (n - 1) * a1 - k * (n - 1) * a2)
    F = -e * k * (n - 1) * (k * a0 + k * (n - 1) * a4 + a7 * r)
    G = -(k ** 2) * (n - 1) ** 2 * (a1 + a2 + 2 * a3 + a4 + a5 + 2 * a6)
    closed = e * a5 * fr.ricci_power(2).data - E * s - F * g - G * np.outer(eta, eta)
    ta_op = operator_form(fr, build_T(fr, c)).data
    by = np.einsum("w,wyui->yui", xi, ta_op)
    direct = -_projected2(by, s, xi).T  # [y, u]
    out = RicciConstants(float(E), float(F), float(G), max_abs(direct - closed))
    if L is not None:
        rhs = L * (e * k * (n - 1) * g - e * s)
        out = replace(out, theorem_residual=max_abs(direct - rhs))
    return out
