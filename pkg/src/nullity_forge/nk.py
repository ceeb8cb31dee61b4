"""(N(k), xi) structures: example registry, nullity identities, closed forms against xi.

All identities are checked as full component arrays, which covers every
coordinate basis vector at once; by multilinearity that is the same as
checking them on arbitrary vectors.
"""

from __future__ import annotations

import math

import numpy as np

from .expr import parse
from .family import CoeffVector, build_T, operator_form, ricci_of_T
from .geometry import ManifoldSpec, PointFrame, covariant_derivative_xi, frame, sample_points
from .tensors import max_abs

NULLITY_TAGS = (
    "eq-cond", "eq-curvature", "eq-curvature-2", "eq-curvature-3",
    "eq-eps-PS-R(X,Y,Z,xi)", "eq-eps-PS-eta(R(X,Y),Z)", "eq-ricci", "eq-Q",
    "eq-S-xi-xi", "eq-eta-QX",
)
LEMMA_TAGS = ("eq-X-Y-xi", "eq-xi-X-xi", "eq-xi-Y-Z", "eq-eta-xi-X-Y", "eq-X-Y-xi-V",
              "eq-X-xi-xi", "eq-ric-T1", "eq-ric-T2")

CLASS_TAGS = ("n(k)-contact", "sasakian", "kenmotsu", "eps-sasakian", "para-sasakian",
              "eps-para-sasakian", "constant-curvature", "generic")


def class_allows(tag: str, k, eps) -> bool:
    """Whether a declared ``(k, eps)`` fits the signature of a structure class."""
    if tag not in CLASS_TAGS:
        raise ValueError(f"unknown class tag {tag!r}")
    if tag == "generic":
        return True
    if k is None or eps is None:
        return False
    return {
        "n(k)-contact": eps == 1,
        "sasakian": (k, eps) == (1, 1),
        "kenmotsu": (k, eps) == (-1, 1),
        "eps-sasakian": k == eps,
        "para-sasakian": (k, eps) == (-1, 1),
        "eps-para-sasakian": k == -eps,
        "constant-curvature": True,
    }[tag]


def _spec(name, n, metric, box, xi=None, k=None, eps=None, tag="generic", desc="",
          signature=0) -> ManifoldSpec:
    return ManifoldSpec(
        name=name, n=n,
        metric={key: parse(src, n) for key, src in metric.items()},
        box=[tuple(b) for b in box],
        xi=[parse(s, n) for s in xi] if xi is not None else None,
        k=k, eps=eps, class_tag=tag, signature=signature, description=desc,
    )


_ANGLE = (0.3, math.pi / 2 - 0.3)
_POLAR = (0.3, math.pi - 0.3)
_T = (-0.5, 0.5)
_FREE = (0.0, 1.0)


def random_polynomial_metric(seed: int, n: int = 3, scale: float = 0.1) -> ManifoldSpec:
    """``g_ij = 2 delta_ij`` plus small random quadratic polynomials, on ``[-1/2, 1/2]^n``.

    Coefficients are rounded to four decimals so the metric source is exact text.
    """
    rng = np.random.default_rng(seed)
    monomials = [""] + [f"x{i}" for i in range(n)]
    monomials += [f"x{i}*x{j}" for i in range(n) for j in range(i, n)]
    metric = {}
    for i in range(n):
        for j in range(i, n):
            terms = ["2" if i == j else "0"]
            for mono, c in zip(monomials, rng.uniform(-scale, scale, len(monomials))):
                c = round(float(c), 4)
                if c == 0.0:
                    continue
                body = f"{abs(c):.4f}" + (f"*{mono}" if mono else "")
                terms.append(("- " if c < 0 else "+ ") + body)
            metric[(i, j)] = " ".join(terms)
    return _spec(f"random-{n}d-{seed}", n, metric, [(-0.5, 0.5)] * n,
                 desc=f"random quadratic perturbation of 2*identity (seed {seed})")


def builtin_registry() -> list:
    """The built-in example manifolds, in a fixed order."""
    out = [
        _spec("s3", 3, {(0, 0): "1", (1, 1): "cos(x0)^2", (2, 2): "sin(x0)^2"},
              [_ANGLE, _FREE, _FREE], xi=["0", "1", "1"], k=1, eps=1, tag="sasakian",
              desc="unit 3-sphere in Hopf coordinates, xi the Hopf field"),
        _spec("s5", 5, {(0, 0): "1", (1, 1): "sin(x0)^2", (2, 2): "cos(x0)^2",
                        (3, 3): "sin(x0)^2*cos(x1)^2", (4, 4): "sin(x0)^2*sin(x1)^2"},
              [_ANGLE, _ANGLE, _FREE, _FREE, _FREE], xi=["0", "0", "1", "1", "1"],
              k=1, eps=1, tag="sasakian",
              desc="unit 5-sphere in Hopf coordinates, xi the Hopf field"),
        _spec("hyperbolic-3d", 3, {(0, 0): "1", (1, 1): "exp(2*x0)", (2, 2): "exp(2*x0)"},
              [_T, _FREE, _FREE], xi=["1", "0", "0"], k=-1, eps=1, tag="kenmotsu",
              desc="H^3(-1) as dt^2 + e^{2t}(dx^2 + dy^2)"),
        _spec("hyperbolic-5d", 5, {(0, 0): "1", **{(i, i): "exp(2*x0)" for i in range(1, 5)}},
              [_T] + [_FREE] * 4, xi=["1", "0", "0", "0", "0"], k=-1, eps=1, tag="kenmotsu",
              desc="H^5(-1) as dt^2 + e^{2t} sum dx_i^2"),
        _spec("kenmotsu-warped-3d", 3,
              {(0, 0): "1", (1, 1): "exp(2*x0)", (2, 2): "exp(2*x0)*sin(x1)^2"},
              [_T, _POLAR, _FREE], xi=["1", "0", "0"], k=-1, eps=1, tag="kenmotsu",
              desc="R x_{e^t} S^2(1)"),
        _spec("kenmotsu-warped-5d", 5,
              {(0, 0): "1", (1, 1): "exp(2*x0)", (2, 2): "exp(2*x0)*sin(x1)^2",
               (3, 3): "exp(2*x0)", (4, 4): "exp(2*x0)*sin(x3)^2"},
              [_T, _POLAR, _FREE, _POLAR, _FREE], xi=["1", "0", "0", "0", "0"],
              k=-1, eps=1, tag="kenmotsu", desc="R x_{e^t} (S^2 x S^2)"),
        _spec("de-sitter-4d", 4,
              {(0, 0): "-1", (1, 1): "cosh(x0)^2", (2, 2): "cosh(x0)^2*sin(x1)^2",
               (3, 3): "cosh(x0)^2*sin(x1)^2*sin(x2)^2"},
              [_T, _POLAR, _POLAR, _FREE], xi=["1", "0", "0", "0"], k=1, eps=-1,
              tag="eps-para-sasakian", signature=1,
              desc="de Sitter space -dt^2 + cosh^2 t dOmega_3^2, timelike xi"),
        _spec("flat-4d", 4, {(i, i): "1" for i in range(4)}, [(-1.0, 1.0)] * 4,
              xi=["1", "0", "0", "0"], k=0, eps=1, tag="constant-curvature",
              desc="Euclidean R^4"),
    ]
    rnd = random_polynomial_metric(0)
    rnd.name = "random-3d"
    out.append(rnd)
    return out


def registry_by_name() -> dict:
    return {spec.name: spec for spec in builtin_registry()}


def nk_registry() -> list:
    """Registry entries that carry a unit field and declared ``(k, eps)``."""
    return [s for s in builtin_registry() if s.has_xi]


def _require_xi(fr: PointFrame):
    if fr.xi is None or fr.eps is None or fr.k is None:
        raise ValueError("frame has no (xi, eps, k) data")


def verify_nullity(fr: PointFrame, max_ell: int = 3) -> dict:
    """Max residual of every nullity identity at one frame, keyed by tag."""
    _require_xi(fr)
    n, g, eye = fr.n, fr.g, np.eye(fr.n)
    xi, eta, eps, k = fr.xi, fr.eta, fr.eps, fr.k
    r13, r04, s, q = fr.R13.data, fr.R04.data, fr.S.data, fr.Q.data
    kn = k * (n - 1)
    res = {
        "eq-cond": max(abs(xi @ g @ xi - eps), abs(eta @ xi - 1.0)),
        "eq-curvature": max_abs(np.einsum("xyzi,z->xyi", r13, xi)
                                - eps * k * (np.einsum("y,xi->xyi", eta, eye)
                                             - np.einsum("x,yi->xyi", eta, eye))),
        "eq-curvature-2": max_abs(np.einsum("w,wxyi->xyi", xi, r13)
                                  - eps * k * (eps * np.einsum("xy,i->xyi", g, xi)
                                               - np.einsum("y,xi->xyi", eta, eye))),
        "eq-curvature-3": max_abs(np.einsum("w,wxzi,z->xi", xi, r13, xi)
                                  - eps * k * (np.outer(eta, xi) - eye)),
        "eq-eps-PS-R(X,Y,Z,xi)": max_abs(np.einsum("xyzv,v->xyz", r04, xi)
                                         - eps * k * (np.einsum("x,yz->xyz", eta, g)
                                                      - np.einsum("y,xz->xyz", eta, g))),
        "eq-eps-PS-eta(R(X,Y),Z)": max_abs(np.einsum("i,xyzi->xyz", eta, r13)
                                           - k * (np.einsum("x,yz->xyz", eta, g)
                                                  - np.einsum("y,xz->xyz", eta, g))),
        "eq-ricci": max_abs(s @ xi - eps * kn * eta),
        "eq-Q": max_abs(q @ xi - kn * xi),
        "eq-S-xi-xi": abs(xi @ s @ xi - eps * kn),
        "eq-eta-QX": max_abs(eta @ q - kn * eta),
    }
    for ell in range(max_ell + 1):
        sl = fr.ricci_power(ell).data
        res[f"eq-Sp-QX-xi[l={ell}]"] = max_abs(sl @ xi - eps * kn ** ell * eta)
    return {key: float(v) for key, v in res.items()}


def kenmotsu_residual(fr: PointFrame) -> float:
    """``max |nabla_X xi - X + eta(X) xi|``."""
    _require_xi(fr)
    d = covariant_derivative_xi(fr)
    return max_abs(d - (np.eye(fr.n) - np.outer(fr.eta, fr.xi)))


def lemma_oracle(fr: PointFrame, c: CoeffVector) -> dict:
    """Closed forms for the T-tensor evaluated against ``xi``.

    Arrays use coordinate slots in argument order followed by the output
    index: ``"eq-X-Y-xi"[x, y, i]`` is ``(T(e_x, e_y) xi)^i``.
    """
    _require_xi(fr)
    n, g, eye = fr.n, fr.g, np.eye(fr.n)
    xi, eta, e, k = fr.xi, fr.eta, fr.eps, fr.k
    s, q, r = fr.S.data, fr.Q.data, fr.r
    a0, a1, a2, a3, a4, a5, a6, a7 = c.as_tuple()
    kn = k * (n - 1)
    ein = np.einsum
    A = -e * k * a0 + e * kn * a2 - e * a7 * r
    B = e * k * a0 + e * kn * a1 + e * a7 * r
    out = {}
    out["eq-X-Y-xi"] = (A * ein("x,yi->xyi", eta, eye) + B * ein("y,xi->xyi", eta, eye)
                        + a3 * ein("xy,i->xyi", s, xi) + e * a4 * ein("y,ix->xyi", eta, q)
                        + e * a5 * ein("x,iy->xyi", eta, q) + kn * a6 * ein("xy,i->xyi", g, xi))
    out["eq-xi-X-xi"] = (A * eye + e * a5 * q.T
                         + (e * k * a0 + e * kn * (a1 + a3 + a4 + a6) + e * a7 * r)
                         * np.outer(eta, xi))
    out["eq-xi-Y-Z"] = ((k * a0 + kn * a4 + a7 * r) * ein("yz,i->yzi", g, xi)
                        + a1 * ein("yz,i->yzi", s, xi) + e * kn * a3 * ein("y,zi->yzi", eta, eye)
                        + e * a5 * ein("z,iy->yzi", eta, q) + e * a6 * ein("y,iz->yzi", eta, q)
                        + A * ein("z,yi->yzi", eta, eye))
    out["eq-eta-xi-X-Y"] = (e * kn * (a1 + a2 + a4 + a5) * np.outer(eta, eta) + a3 * s
                            + kn * a6 * g)
    out["eq-X-Y-xi-V"] = (A * ein("x,yv->xyv", eta, g) + B * ein("y,xv->xyv", eta, g)
                          + e * a3 * ein("xy,v->xyv", s, eta) + e * a4 * ein("y,xv->xyv", eta, s)
                          + e * a5 * ein("x,yv->xyv", eta, s) + e * kn * a6 * ein("xy,v->xyv", g, eta))
    out["eq-X-xi-xi"] = ((-e * k * a0 + e * kn * (a2 + a3 + a5 + a6) - e * a7 * r)
                         * np.outer(eta, xi) + B * eye + e * a4 * q.T)
    bracket = e * kn * (a0 + n * a1 + a2 + a3 + a5 + a6) + e * r * (a4 + (n - 1) * a7)
    out["eq-ric-T1"] = bracket * eta
    out["eq-ric-T2"] = np.array(bracket)
    return out


def lemma_direct(fr: PointFrame, c: CoeffVector) -> dict:
    """The same quantities as :func:`lemma_oracle`, contracted from ``build_T``."""
    _require_xi(fr)
    xi, eta = fr.xi, fr.eta
    t04 = build_T(fr, c)
    t = operator_form(fr, t04).data
    st = ricci_of_T(fr, c).data
    ein = np.einsum
    return {
        "eq-X-Y-xi": ein("xyzi,z->xyi", t, xi),
        "eq-xi-X-xi": ein("w,wxzi,z->xi", xi, t, xi),
        "eq-xi-Y-Z": ein("w,wyzi->yzi", xi, t),
        "eq-eta-xi-X-Y": ein("i,xyzi,z->xy", eta, t, xi),
        "eq-X-Y-xi-V": ein("xyzv,z->xyv", t04.data, xi),
        "eq-X-xi-xi": ein("xwzi,w,z->xi", t, xi, xi),
        "eq-ric-T1": st @ xi,
        "eq-ric-T2": np.array(xi @ st @ xi),
    }


def lemma_residuals(fr: PointFrame, c: CoeffVector) -> dict:
    oracle, direct = lemma_oracle(fr, c), lemma_direct(fr, c)
    return {tag: max_abs(oracle[tag] - direct[tag]) for tag in LEMMA_TAGS}


def nk_frames(spec: ManifoldSpec, count: int = 20, seed: int = 0, max_ell: int = 3) -> list:
    return [frame(spec, p, max_ell) for p in sample_points(spec, count, seed)]
