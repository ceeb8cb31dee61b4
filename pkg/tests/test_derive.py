import numpy as np
import pytest

from nullity_forge.derive import (CurvOp, condition_residual, curvature_op, derive, q_op,
                                  wedge_op)
from nullity_forge.geometry import frame, sample_points
from nullity_forge.nk import builtin_registry, random_polynomial_metric
from nullity_forge.tensors import Tensor


def _frames(spec, count=3):
    return [frame(spec, p) for p in sample_points(spec, count, seed=3)]


def _random_op(rng, n):
    a = rng.normal(size=(n, n, n, n))
    return CurvOp.from_array(a - np.swapaxes(a, 0, 1))


def test_definition_on_rank_one():
    rng = np.random.default_rng(0)
    b = _random_op(rng, 3)
    w = rng.normal(size=3)
    out = derive(b, Tensor.covariant(w)).data
    # (B.w)(X1, X, Y) = -w(B(X,Y) X1)
    np.testing.assert_allclose(out, -np.einsum("xyai,i->axy", b.op.data, w))


def test_leibniz_rule():
    rng = np.random.default_rng(1)
    n = 3
    b = _random_op(rng, n)
    k1 = Tensor.covariant(rng.normal(size=n))
    k2 = Tensor.covariant(rng.normal(size=(n, n)))
    prod = Tensor.covariant(np.einsum("a,bc->abc", k1.data, k2.data))
    lhs = derive(b, prod).data
    rhs = (np.einsum("axy,bc->abcxy", derive(b, k1).data, k2.data)
           + np.einsum("a,bcxy->abcxy", k1.data, derive(b, k2).data))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_q_op_linear():
    rng = np.random.default_rng(2)
    n = 4
    s1, s2 = (rng.normal(size=(n, n)) for _ in range(2))
    s1, s2 = Tensor.covariant(s1 + s1.T), Tensor.covariant(s2 + s2.T)
    k1, k2 = Tensor.covariant(rng.normal(size=(n, n))), Tensor.covariant(rng.normal(size=(n, n)))
    np.testing.assert_allclose(q_op(s1 + s2, k1).data, q_op(s1, k1).data + q_op(s2, k1).data, atol=1e-12)
    np.testing.assert_allclose(q_op(s1, k1 + k2).data, q_op(s1, k1).data + q_op(s1, k2).data, atol=1e-12)
    np.testing.assert_allclose(q_op(s1, k1).data, derive(wedge_op(s1), k1).data)


def test_q_g_g_vanishes():
    g = Tensor.covariant(np.diag([1.0, 2.0, 3.0]))
    assert np.max(np.abs(q_op(g, g).data)) < 1e-14


def test_errors():
    rng = np.random.default_rng(3)
    b = _random_op(rng, 3)
    with pytest.raises(ValueError):
        derive(b, Tensor(np.array(1.0), ()))
    with pytest.raises(ValueError):
        derive(b, Tensor(np.eye(3), ("u", "l")))
    with pytest.raises(ValueError):
        q_op(Tensor.covariant(rng.normal(size=(3, 3)) + np.eye(3) * 5), Tensor.covariant(np.eye(3)))
    with pytest.raises(ValueError):
        q_op(Tensor(np.eye(3), ("u", "l")), Tensor.covariant(np.eye(3)))
    with pytest.raises(ValueError):
        CurvOp(Tensor.covariant(np.zeros((3,) * 4)))


def test_contravariant_input_is_lowered(registry):
    fr = _frames(registry["kenmotsu-warped-3d"], 1)[0]
    b = curvature_op(fr)
    # lowering the upper slot of Q gives back S
    np.testing.assert_allclose(derive(b, fr.Q, fr).data, derive(b, fr.S).data, atol=1e-12)


@pytest.mark.parametrize("spec", builtin_registry(), ids=lambda s: s.name)
def test_metric_compatibility_and_skew(spec):
    for fr in _frames(spec):
        b = curvature_op(fr)
        assert b.skew()
        assert wedge_op(fr.S).skew()
        assert np.max(np.abs(derive(b, fr.metric.g).data)) < 1e-10


def test_s5_semisymmetric_and_q_g_r_zero(registry):
    for fr in _frames(registry["s5"]):
        assert np.max(np.abs(derive(curvature_op(fr), fr.R04).data)) < 1e-12
        assert np.max(np.abs(q_op(fr.metric.g, fr.R04).data)) < 1e-12


def test_kenmotsu_ricci_pseudosymmetric(registry):
    for fr in _frames(registry["kenmotsu-warped-3d"]):
        lhs = derive(curvature_op(fr), fr.S).data
        rhs = -q_op(fr.metric.g, fr.S).data
        assert np.max(np.abs(rhs)) > 1e-3
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)
        assert condition_residual(curvature_op(fr), fr.R04, fr.metric.g, -1.0) < 1e-8


def test_flat_residual_zero(registry):
    fr = _frames(registry["flat-4d"], 1)[0]
    assert condition_residual(curvature_op(fr), fr.R04, fr.S, 3.7) == 0.0


@pytest.mark.parametrize("spec", [s for s in builtin_registry() if s.n == 3]
                         + [random_polynomial_metric(seed) for seed in range(1, 11)],
                         ids=lambda s: s.name)
def test_three_dimensional_rr_equals_q_s_r(spec):
    for fr in _frames(spec, 2):
        lhs = derive(curvature_op(fr), fr.R04).data
        rhs = q_op(fr.S, fr.R04).data
        np.testing.assert_allclose(lhs, rhs, atol=1e-8)
