"""Curvature of a chart metric at a point, from exact second-order jets.

Index conventions used throughout the package:

* ``gamma[i, j, k]`` is the Christoffel symbol with upper index ``i``.
* ``R13[x, y, z, i]`` is the ``i``-component of ``R(e_x, e_y) e_z`` where
  ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``.
* ``R04[x, y, z, v] = g(R(e_x, e_y) e_z, e_v)``.
* ``S(Y, Z)`` is the trace of ``X -> R(X, Y) Z``; with these choices the unit
  sphere has ``R(X, Y) Z = g(Y, Z) X - g(X, Z) Y`` and ``S = (n - 1) g``.
* ``Q[i, x]`` is the Ricci operator, ``(QX)^i = Q[i, x] X^x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .expr import compile_tape, to_source
from .kernels import tape_hessian
from .tensors import MetricPair, Tensor


@dataclass
class ManifoldSpec:
    """Chart-level description of one example manifold.

    ``metric`` maps upper-triangle index pairs ``(i, j)`` with ``i <= j`` to
    expressions; missing pairs are zero. ``xi`` is ``None`` for manifolds
    without a distinguished unit field.
    """

    name: str
    n: int
    metric: dict
    box: list
    xi: list | None = None
    k: float | None = None
    eps: int | None = None
    class_tag: str = "generic"
    signature: int | None = None
    description: str = ""
    _tapes: dict = field(init=False, repr=False)
    _xi_tapes: list = field(init=False, repr=False)

    def __post_init__(self):
        for (i, j) in self.metric:
            if not (0 <= i <= j < self.n):
                raise ValueError(f"metric key ({i},{j}) is not an upper-triangle index pair")
        if len(self.box) != self.n:
            raise ValueError("chart box needs one interval per coordinate")
        if self.xi is not None and len(self.xi) != self.n:
            raise ValueError("xi needs one component per coordinate")
        if self.eps is not None and self.eps not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        self._tapes = {key: compile_tape(ast) for key, ast in self.metric.items()}
        self._xi_tapes = [compile_tape(a) for a in self.xi] if self.xi is not None else []

    @property
    def has_xi(self) -> bool:
        return self.xi is not None

    def metric_source(self) -> dict:
        return {f"{i},{j}": to_source(a) for (i, j), a in sorted(self.metric.items())}


@dataclass(frozen=True, eq=False)
class PointFrame:
    point: np.ndarray
    metric: MetricPair
    gamma: np.ndarray
    R13: Tensor
    R04: Tensor
    S: Tensor
    Q: Tensor
    r: float
    ricci_powers: dict
    xi: np.ndarray | None = None
    eta: np.ndarray | None = None
    eps: int | None = None
    k: float | None = None
    dxi: np.ndarray | None = None  # dxi[j, i] = d_j xi^i

    @property
    def n(self) -> int:
        return self.metric.n

    @property
    def g(self) -> np.ndarray:
        return self.metric.g.data

    @property
    def g_inv(self) -> np.ndarray:
        return self.metric.g_inv.data

    def ricci_power(self, ell: int) -> Tensor:
        """``S^ell(X, Y) = g(Q^ell X, Y)``, computed on demand past the cache."""
        if ell < 0:
            raise ValueError("ell must be non-negative")
        if ell not in self.ricci_powers:
            q = np.linalg.matrix_power(self.Q.data, ell)
            self.ricci_powers[ell] = Tensor.covariant(q.T @ self.g)
        return self.ricci_powers[ell]


def metric_jets(spec: ManifoldSpec, p):
    """Return ``g[i,j]``, ``dg[d,i,j]`` and ``ddg[d,e,i,j]`` at ``p``."""
    n = spec.n
    g = np.zeros((n, n))
    dg = np.zeros((n, n, n))
    ddg = np.zeros((n, n, n, n))
    for (i, j), tape in spec._tapes.items():
        value, grad, hess = tape_hessian(tape, p)
        g[i, j] = g[j, i] = value
        dg[:, i, j] = dg[:, j, i] = grad
        ddg[:, :, i, j] = ddg[:, :, j, i] = hess
    return g, dg, ddg


def metric_at(spec: ManifoldSpec, p) -> MetricPair:
    return MetricPair.from_matrix(metric_jets(spec, p)[0])


def _christoffel_from(g_inv, dg):
    # A[l, j, k] = d_j g_lk + d_k g_jl - d_l g_jk
    a = np.einsum("jlk->ljk", dg) + np.einsum("kjl->ljk", dg) - dg
    return 0.5 * np.einsum("il,ljk->ijk", g_inv, a), a


def christoffel(spec: ManifoldSpec, p) -> np.ndarray:
    """Levi-Civita symbols ``gamma[i, j, k]`` at ``p``."""
    g, dg, _ = metric_jets(spec, p)
    metric = MetricPair.from_matrix(g)
    return _christoffel_from(metric.g_inv.data, dg)[0]


def fd_christoffel(spec: ManifoldSpec, p, h: float = 1e-5) -> np.ndarray:
    """Christoffel symbols from central differences of metric values (test oracle)."""
    p = np.asarray(p, dtype=float)
    n = spec.n
    dg = np.zeros((n, n, n))
    for d in range(n):
        step = np.zeros(n)
        step[d] = h
        dg[d] = (metric_jets(spec, p + step)[0] - metric_jets(spec, p - step)[0]) / (2 * h)
    g_inv = np.linalg.inv(metric_jets(spec, p)[0])
    return _christoffel_from(g_inv, dg)[0]


def _curvature(g, dg, ddg):
    metric = MetricPair.from_matrix(g)
    g_inv = metric.g_inv.data
    gamma, a = _christoffel_from(g_inv, dg)
    da = (np.einsum("djlk->dljk", ddg) + np.einsum("dkjl->dljk", ddg)
          - np.einsum("dljk->dljk", ddg))
    dg_inv = -np.einsum("ia,dab,bl->dil", g_inv, dg, g_inv)
    dgamma = 0.5 * (np.einsum("dil,ljk->dijk", dg_inv, a) + np.einsum("il,dljk->dijk", g_inv, da))
    r13 = (np.einsum("xiyz->xyzi", dgamma) - np.einsum("yixz->xyzi", dgamma)
           + np.einsum("ixm,myz->xyzi", gamma, gamma) - np.einsum("iym,mxz->xyzi", gamma, gamma))
    return metric, gamma, r13


def riemann(spec: ManifoldSpec, p):
    """Return ``(R13, R04)`` at ``p`` (see module docstring for slot order)."""
    metric, _, r13 = _curvature(*metric_jets(spec, p))
    g = metric.g.data
    return (Tensor(r13, ("l", "l", "l", "u")),
            Tensor(np.einsum("xyzi,iv->xyzv", r13, g), ("l", "l", "l", "l")))


def frame_from_jets(g, dg, ddg, point=None, max_ell: int = 3, xi=None, dxi=None,
                    eps=None, k=None) -> PointFrame:
    """Assemble a :class:`PointFrame` from metric jets."""
    metric, gamma, r13 = _curvature(g, dg, ddg)
    g = metric.g.data
    g_inv = metric.g_inv.data
    r04 = np.einsum("xyzi,iv->xyzv", r13, g)
    s = np.einsum("xyzx->yz", r13)
    q = g_inv @ s
    r = float(np.trace(q))
    powers = {0: Tensor.covariant(g)}
    qp = np.eye(len(g))
    for ell in range(1, max_ell + 1):
        qp = qp @ q
        powers[ell] = Tensor.covariant(qp.T @ g)
    eta = None
    if xi is not None:
        xi = np.asarray(xi, dtype=float)
        eta = eps * (g @ xi)
    return PointFrame(
        point=np.asarray(point if point is not None else np.zeros(len(g)), dtype=float),
        metric=metric, gamma=gamma,
        R13=Tensor(r13, ("l", "l", "l", "u")), R04=Tensor(r04, ("l",) * 4),
        S=Tensor.covariant(s), Q=Tensor(q, ("u", "l")), r=r, ricci_powers=powers,
        xi=xi, eta=eta, eps=eps, k=k, dxi=dxi,
    )


def frame(spec: ManifoldSpec, p, max_ell: int = 3) -> PointFrame:
    """All curvature data of ``spec`` at chart point ``p``."""
    p = np.asarray(p, dtype=float)
    g, dg, ddg = metric_jets(spec, p)
    xi = dxi = None
    if spec.has_xi:
        xi = np.zeros(spec.n)
        dxi = np.zeros((spec.n, spec.n))
        for i, tape in enumerate(spec._xi_tapes):
            value, grad, _ = tape_hessian(tape, p)
            xi[i] = value
            dxi[:, i] = grad
    return frame_from_jets(g, dg, ddg, point=p, max_ell=max_ell, xi=xi, dxi=dxi,
                           eps=spec.eps, k=spec.k)


def sample_points(spec: ManifoldSpec, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic scrambled-Halton points inside the chart box."""
    if count < 1:
        raise ValueError("count must be positive")
    lo = np.array([b[0] for b in spec.box], dtype=float)
    hi = np.array([b[1] for b in spec.box], dtype=float)
    unit = qmc.Halton(d=spec.n, scramble=True, seed=seed).random(count)
    return lo + unit * (hi - lo)


def covariant_derivative_xi(fr: PointFrame) -> np.ndarray:
    """``nabla xi`` as ``D[j, i] = (nabla_{e_j} xi)^i``."""
    return fr.dxi + np.einsum("ijk,k->ji", fr.gamma, fr.xi)


def riemann_symmetry_residuals(fr: PointFrame) -> dict:
    """Residuals of the algebraic Riemann symmetries and of metric compatibility."""
    r = fr.R04.data
    r13 = fr.R13.data
    bianchi = r13 + np.einsum("xyzi->yzxi", r13) + np.einsum("xyzi->zxyi", r13)
    return {
        "antisym-01": float(np.max(np.abs(r + np.swapaxes(r, 0, 1)))),
        "antisym-23": float(np.max(np.abs(r + np.swapaxes(r, 2, 3)))),
        "pair-symmetry": float(np.max(np.abs(r - np.einsum("xyzv->zvxy", r)))),
        "bianchi-1": float(np.max(np.abs(bianchi))),
    }


def metric_compatibility_residual(spec: ManifoldSpec, p) -> float:
    """``max |d_k g_ij - gamma^l_ki g_lj - gamma^l_kj g_il|`` at ``p``."""
    g, dg, _ = metric_jets(spec, p)
    gamma = _christoffel_from(np.linalg.inv(g), dg)[0]
    rhs = np.einsum("lki,lj->kij", gamma, g) + np.einsum("lkj,il->kij", gamma, g)
    return float(np.max(np.abs(dg - rhs)))
