import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullity_forge import kernels
from nullity_forge.expr import (BinOp, Call, Const, CoordinateIndexError, ExprDomainError,
                                ExprSyntaxError, Jet2, UnknownFunctionError, Var, compile_tape,
                                eval_jet, evaluate, parse, to_source)
from nullity_forge.kernels import tape_hessian


def test_parse_shapes():
    assert parse("x0", 1) == Var(0)
    assert parse("exp(2*x0)", 2) == Call("exp", (BinOp("*", Const(2.0), Var(0)),))


def test_sin_squared_value():
    assert evaluate(parse("sin(x0)^2", 2), (math.pi / 3, 0.0)) == pytest.approx(0.75, abs=1e-15)


def test_unary_minus_and_power():
    # the power binds to the atom, the minus applies to its result
    assert evaluate(parse("-x0^2", 1), (3.0,)) == -9.0


@pytest.mark.parametrize("src, exc, offset", [
    ("x0 +", ExprSyntaxError, 4),
    ("(x0", ExprSyntaxError, 3),
    ("foo(x0)", UnknownFunctionError, 0),
    ("x0 + x7", CoordinateIndexError, 5),
    ("x0 $ 1", ExprSyntaxError, 3),
])
def test_parse_errors_carry_byte_offset(src, exc, offset):
    with pytest.raises(exc) as info:
        parse(src, 2)
    assert info.value.offset == offset
    assert f"byte {offset}" in str(info.value)


def test_jet_examples():
    j = eval_jet(parse("x0*x1", 2), (2.0, 3.0), 0, 1)
    assert (j.value, j.d_a, j.d_b, j.d_ab) == (6.0, 3.0, 2.0, 1.0)
    j = eval_jet(parse("exp(2*x0)", 1), (0.5,), 0, 0)
    e = math.e
    assert j.value == pytest.approx(e, rel=1e-15)
    assert j.d_a == pytest.approx(2 * e, rel=1e-15)
    assert j.d_ab == pytest.approx(4 * e, rel=1e-15)
    j = eval_jet(parse("7", 2), (0.1, 0.2), 1, 0)
    assert j == Jet2(7.0)


@pytest.mark.parametrize("src, point", [("sqrt(x0)", (-1.0,)), ("1/(x0 - 1)", (1.0,)),
                                        ("pow(x0, 0.5)", (-2.0,))])
def test_domain_errors_name_subexpression(src, point):
    node = parse(src, 1)
    with pytest.raises(ExprDomainError) as info:
        eval_jet(node, point, 0, 0)
    assert info.value.subexpr
    with pytest.raises(ExprDomainError):
        tape_hessian(compile_tape(node), point)


# -- random expressions -------------------------------------------------------

def _exprs(n, depth):
    """Random expression sources of nesting depth at most ``depth``."""
    leaf = st.one_of(
        st.integers(0, n - 1).map(lambda i: f"x{i}"),
        st.sampled_from(["0.5", "2", "1.25", "3"]),
    )
    if depth == 0:
        return leaf
    sub = _exprs(n, depth - 1)
    return st.one_of(
        leaf,
        st.tuples(sub, st.sampled_from("+-*"), sub).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(st.sampled_from(["sin", "cos", "tanh", "exp"]), sub).map(lambda t: f"{t[0]}({t[1]})"),
        sub.map(lambda c: f"({c})^2"),
        sub.map(lambda c: f"-({c})"),
        sub.map(lambda c: f"sqrt(1 + ({c})^2)"),
        st.tuples(sub, sub).map(lambda t: f"({t[0]})/(2 + cos({t[1]}))"),
    )


@st.composite
def _cases(draw):
    n = draw(st.integers(1, 4))
    src = draw(_exprs(n, draw(st.integers(1, 5))))
    pt = draw(st.lists(st.floats(-0.8, 0.8), min_size=n, max_size=n))
    return src, n, pt


@settings(max_examples=150, deadline=None)
@given(_cases())
def test_round_trip(case):
    src, n, _ = case
    node = parse(src, n)
    assert parse(to_source(node), n) == node


@settings(max_examples=150, deadline=None)
@given(_cases(), st.data())
def test_jet_matches_central_differences(case, data):
    src, n, pt = case
    node = parse(src, n)
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1))
    j = eval_jet(node, pt, a, b)
    h = 1e-5
    p = np.asarray(pt)
    step, ea = np.eye(n)[b] * h, np.eye(n)[a] * h
    da = (evaluate(node, p + ea) - evaluate(node, p - ea)) / (2 * h)
    # mixed second derivative: central difference of the exact first derivative
    dab = (eval_jet(node, p + step, a, a).d_a - eval_jet(node, p - step, a, a).d_a) / (2 * h)
    assert abs(j.d_a - da) <= 1e-6 * max(1.0, abs(j.d_a))
    assert abs(j.d_ab - dab) <= 1e-6 * max(1.0, abs(j.d_ab))


@settings(max_examples=100, deadline=None)
@given(_cases(), _cases())
def test_product_rule_exact(c1, c2):
    (s1, n1, p1), (s2, n2, _) = c1, c2
    n = max(n1, n2)
    pt = (list(p1) + [0.3] * n)[:n]
    f, g = parse(s1, n), parse(s2, n)
    for a, b in [(0, 0), (0, n - 1), (n - 1, 0)]:
        prod = eval_jet(BinOp("*", f, g), pt, a, b)
        assert prod == eval_jet(f, pt, a, b) * eval_jet(g, pt, a, b)


@settings(max_examples=100, deadline=None)
@given(_cases())
def test_tape_matches_jets(case):
    src, n, pt = case
    node = parse(src, n)
    value, grad, hess = tape_hessian(compile_tape(node), pt, "python")
    for a in range(n):
        for b in range(n):
            j = eval_jet(node, pt, a, b)
            scale = max(1.0, abs(j.d_ab))
            assert abs(hess[a, b] - j.d_ab) <= 1e-12 * scale
        assert grad[a] == pytest.approx(eval_jet(node, pt, a, a).d_a, rel=1e-12, abs=1e-12)
    assert value == pytest.approx(evaluate(node, pt), rel=1e-14, abs=1e-14)


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")
@settings(max_examples=100, deadline=None)
@given(_cases())
def test_backends_agree(case):
    src, n, pt = case
    tape = compile_tape(parse(src, n))
    py = tape_hessian(tape, pt, "python")
    cy = tape_hessian(tape, pt, "cython")
    for x, y in zip(py, cy):
        np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-14)


def test_unknown_backend():
    with pytest.raises(ValueError):
        tape_hessian(compile_tape(parse("x0", 1)), (0.0,), "fortran")
