import numpy as np
import pytest

from nullity_forge.family import TPS_PRESETS, CoeffVector, coefficients
from nullity_forge.geometry import frame, sample_points
from nullity_forge.nk import builtin_registry, nk_registry
from nullity_forge.pseudosym import (ConditionSpec, classify, dichotomy_check, fit_from_arrays, fit_L,
                                     master_identity_check, perturbed, ricci_condition_constants,
                                     rrsl_corollary_check, summarize_fits)


def _frames(spec, count=3):
    return [frame(spec, p) for p in sample_points(spec, count, seed=6)]


RR_G = lambda n: ConditionSpec.from_presets("TT-g", "r", "r", n)  # noqa: E731


def test_condition_spec_validation():
    with pytest.raises(ValueError):
        ConditionSpec("TT-h", CoeffVector(a0=1.0), CoeffVector(a0=1.0))
    with pytest.raises(ValueError):
        ConditionSpec("TT-g", CoeffVector(a0=1.0), CoeffVector(a0=1.0), ell=2)
    c = ConditionSpec.from_presets("T-RicciT-Sl", "r", "w2", 4, ell=2)
    assert c.ricci_kind and c.sigma_ell == 2
    assert c.label() == "r.S_w2=L*Q(S^2,S_w2)"


def test_fit_from_arrays_states():
    assert fit_from_arrays([0.0, 1e-12], [1e-13, 0.0]).degenerate
    rep = fit_from_arrays([1.0, 0.0], [0.0, 0.0])
    assert rep.L is None and not rep.degenerate
    rep = fit_from_arrays([2.0, 4.0], [1.0, 2.0])
    assert rep.L == pytest.approx(2.0) and rep.residual == pytest.approx(0.0)


def test_random_3d_ricci_generalized(registry):
    cond = ConditionSpec.from_presets("TT-Sl", "r", "r", 3, ell=1)
    for fr in _frames(registry["random-3d"]):
        rep = fit_L(cond, fr)
        assert rep.L == pytest.approx(1.0, abs=1e-6)
        assert rep.residual < 1e-8


def test_kenmotsu_m3_pseudosymmetric(registry):
    for fr in _frames(registry["kenmotsu-warped-3d"]):
        rep = fit_L(RR_G(3), fr)
        assert rep.L == pytest.approx(-1.0, abs=1e-6) and rep.residual < 1e-8
        assert master_identity_check(RR_G(3), fr, rep.L) < 1e-8


def test_s5_degenerate(registry):
    reps = [fit_L(RR_G(5), fr) for fr in _frames(registry["s5"])]
    assert all(r.degenerate and r.L is None for r in reps)
    s = summarize_fits(reps)
    assert s["degenerate"] == 3 and s["mean_L"] is None


def test_scale_consistency(registry):
    rng = np.random.default_rng(7)
    fr = _frames(registry["kenmotsu-warped-5d"], 1)[0]
    base = ConditionSpec.from_presets("TT-g", "r", "w3", 5)
    ref = fit_L(base, fr)
    for lam in rng.uniform(0.2, 5.0, size=3):
        scaled = ConditionSpec(base.kind, base.ta, lam * base.tb)
        rep = fit_L(scaled, fr)
        assert rep.L == pytest.approx(ref.L, rel=1e-10)
        assert rep.degenerate == ref.degenerate
        assert rep.residual == pytest.approx(lam * ref.residual, rel=1e-6, abs=1e-14)


def test_ell_zero_matches_metric_kind(registry):
    fr = _frames(registry["kenmotsu-warped-3d"], 1)[0]
    for kind_l, kind_g in (("TT-Sl", "TT-g"), ("T-RicciT-Sl", "T-RicciT-g")):
        a = fit_L(ConditionSpec.from_presets(kind_l, "r", "conformal", 3, 0), fr)
        b = fit_L(ConditionSpec.from_presets(kind_g, "r", "conformal", 3), fr)
        assert a.as_dict() == b.as_dict()


def test_classify(registry):
    h5 = classify(_frames(registry["hyperbolic-5d"], 1)[0])
    assert h5.kn_einstein_residual < 1e-12
    m3 = classify(_frames(registry["kenmotsu-warped-3d"], 1)[0])
    assert m3.eta_einstein_residual < 1e-8 and abs(m3.beta) > 1e-3
    assert m3.einstein_residual > 1e-3
    flat = classify(_frames(registry["flat-4d"], 1)[0])
    assert flat.einstein_residual == 0.0 and flat.r == 0.0


@pytest.mark.parametrize("spec", nk_registry(), ids=lambda s: s.name)
def test_dichotomy_never_violated(spec):
    if spec.n < 3:
        pytest.skip("presets need n >= 3")
    for fr in _frames(spec, 2):
        for preset in TPS_PRESETS:
            cond = ConditionSpec.from_presets("TT-g", "r", preset, spec.n)
            rep = fit_L(cond, fr)
            assert dichotomy_check(fr, cond.tb, rep.L).verdict != "violation", preset


def test_dichotomy_branches_and_control(registry):
    m3 = _frames(registry["kenmotsu-warped-3d"], 1)[0]
    assert dichotomy_check(m3, coefficients("r", 3), -1.0).verdict == "l-branch"
    s5 = _frames(registry["s5"], 1)[0]
    assert dichotomy_check(s5, coefficients("r", 5), None).verdict == "einstein"
    bad = perturbed(m3, 0.3 * np.outer(m3.eta, m3.eta) + 0.1 * np.eye(3))
    assert dichotomy_check(bad, coefficients("r", 3), 0.4).verdict == "violation"
    zero = CoeffVector(a0=1.0, a5=-1.0)
    assert dichotomy_check(m3, zero, -1.0).verdict == "precondition-failed"
    with pytest.raises(ValueError):
        dichotomy_check(_frames(registry["random-3d"], 1)[0], coefficients("r", 3), 1.0)


def test_rrsl_inapplicable_cases(registry):
    s5 = _frames(registry["s5"], 1)[0]
    rep = rrsl_corollary_check(s5, 1)
    assert not rep.applicable and rep.reason == "semisymmetric"
    flat = _frames(registry["flat-4d"], 1)[0]
    assert not rrsl_corollary_check(flat, 1).applicable
    with pytest.raises(ValueError):
        rrsl_corollary_check(s5, 0)


def test_rrsl_ell_one_matches_fit_path(registry):
    cond = ConditionSpec.from_presets("TT-Sl", "r", "r", 3, ell=1)
    for fr in _frames(registry["kenmotsu-warped-3d"]):
        rep = rrsl_corollary_check(fr, 1)
        assert rep.applicable
        assert rep.fitted_L == fit_L(cond, fr).L
        assert rep.predicted_L == pytest.approx(0.5)


def test_rrsl_m3_reports_measured_gap(registry):
    # M^3 is eta-Einstein but not Einstein: the corollary's hypotheses fail and
    # the measured L is the three-dimensional value 1, not 1/(n-1)
    rep = rrsl_corollary_check(_frames(registry["kenmotsu-warped-3d"], 1)[0], 1)
    assert rep.fitted_L == pytest.approx(1.0, abs=1e-9)
    assert rep.einstein_residual > 0.1
    assert rep.holds is False


def test_ricci_constants(registry):
    h5 = _frames(registry["hyperbolic-5d"], 1)[0]
    rc = ricci_condition_constants(h5, coefficients("r", 5))
    assert (rc.E, rc.F, rc.G) == pytest.approx((-1.0, -4.0, 0.0), abs=1e-12)
    s5 = _frames(registry["s5"], 1)[0]
    assert ricci_condition_constants(s5, coefficients("concircular", 5)).E == pytest.approx(0.0, abs=1e-12)
    flat = _frames(registry["flat-4d"], 1)[0]
    rc = ricci_condition_constants(flat, coefficients("conformal", 4))
    assert (rc.E, rc.F, rc.G) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("spec", nk_registry(), ids=lambda s: s.name)
def test_ricci_constants_closed_form(spec):
    if spec.n < 3:
        pytest.skip("presets need n >= 3")
    rng = np.random.default_rng(8)
    for fr in _frames(spec, 2):
        c = CoeffVector.from_sequence(rng.normal(size=8))
        assert ricci_condition_constants(fr, c).closed_form_residual < 1e-9


def test_ricci_constants_theorem_on_kenmotsu(registry):
    fr = _frames(registry["kenmotsu-warped-3d"], 1)[0]
    rc = ricci_condition_constants(fr, coefficients("r", 3), L=-1.0)
    assert rc.theorem_residual < 1e-9


@pytest.mark.parametrize("spec", builtin_registry(), ids=lambda s: s.name)
def test_master_identity_when_non_degenerate(spec):
    if spec.n < 3:
        pytest.skip("presets need n >= 3")
    for fr in _frames(spec, 2):
        rep = fit_L(RR_G(spec.n), fr)
        if not rep.degenerate and rep.L is not None and rep.residual < 1e-8:
            assert master_identity_check(RR_G(spec.n), fr, rep.L) < 1e-7


def test_master_identity_trivial_condition(registry):
    fr = _frames(registry["flat-4d"], 1)[0]
    assert master_identity_check(RR_G(4), fr, 123.0) == 0.0


def test_mixed_tensor_projection_differs_for_ricci_sigma(registry):
    # differentiating the (1,3) tensor before pairing with xi is not the same
    # identity once sigma is not a multiple of g
    fr = _frames(registry["kenmotsu-warped-3d"], 1)[0]
    cond = ConditionSpec.from_presets("TT-Sl", "r", "r", 3, ell=1)
    assert master_identity_check(cond, fr, 1.0) < 1e-10
    assert master_identity_check(cond, fr, 1.0, mixed=True) > 1e-3
    assert master_identity_check(RR_G(3), fr, -1.0, mixed=True) < 1e-10
