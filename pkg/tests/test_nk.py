import numpy as np
import pytest

from nullity_forge.family import PRESETS, coefficients, preset_coefficients
from nullity_forge.geometry import frame
from nullity_forge.nk import (CLASS_TAGS, LEMMA_TAGS, NULLITY_TAGS, builtin_registry, class_allows,
                              kenmotsu_residual, lemma_direct, lemma_oracle, lemma_residuals,
                              nk_frames, nk_registry, random_polynomial_metric, verify_nullity)


def test_registry_covers_required_entries(registry):
    for name in ("s3", "s5", "hyperbolic-3d", "hyperbolic-5d", "kenmotsu-warped-3d",
                 "kenmotsu-warped-5d", "de-sitter-4d", "flat-4d", "random-3d"):
        assert name in registry
    ds = registry["de-sitter-4d"]
    assert (ds.k, ds.eps, ds.signature) == (1, -1, 1)
    assert registry["flat-4d"].k == 0
    assert all(s.has_xi for s in nk_registry())
    assert not registry["random-3d"].has_xi


@pytest.mark.parametrize("spec", builtin_registry(), ids=lambda s: s.name)
def test_declared_class_is_consistent(spec):
    assert spec.class_tag in CLASS_TAGS
    assert class_allows(spec.class_tag, spec.k, spec.eps)


def test_class_table():
    assert class_allows("kenmotsu", -1, 1) and not class_allows("kenmotsu", 1, 1)
    assert class_allows("eps-sasakian", -1, -1) and class_allows("eps-para-sasakian", 1, -1)
    assert not class_allows("sasakian", None, None)
    with pytest.raises(ValueError):
        class_allows("nearly-kaehler", 1, 1)


@pytest.mark.parametrize("spec", nk_registry(), ids=lambda s: s.name)
def test_nullity_identities(spec):
    for fr in nk_frames(spec, 6, seed=4):
        res = verify_nullity(fr)
        assert set(NULLITY_TAGS) <= {t.split("[")[0] for t in res}
        bad = {t: v for t, v in res.items() if v > 1e-9}
        assert not bad


def test_kenmotsu_h5_s_xi_xi(registry):
    fr = nk_frames(registry["hyperbolic-5d"], 1)[0]
    assert fr.xi @ fr.S.data @ fr.xi == pytest.approx(-4.0, abs=1e-12)


def test_de_sitter_ricci_xi(registry):
    rng = np.random.default_rng(0)
    fr = nk_frames(registry["de-sitter-4d"], 1)[0]
    x = rng.normal(size=4)
    assert x @ fr.S.data @ fr.xi == pytest.approx(-3.0 * fr.eta @ x, abs=1e-12)


def test_s3_second_power(registry):
    fr = nk_frames(registry["s3"], 1)[0]
    np.testing.assert_allclose(fr.ricci_power(2).data @ fr.xi, 4 * fr.eta, atol=1e-12)


@pytest.mark.parametrize("name", ["kenmotsu-warped-3d", "kenmotsu-warped-5d", "hyperbolic-3d"])
def test_kenmotsu_structure(registry, name):
    for fr in nk_frames(registry[name], 5):
        assert kenmotsu_residual(fr) < 1e-9


@pytest.mark.parametrize("spec", nk_registry(), ids=lambda s: s.name)
def test_lemma_oracle_agrees(spec):
    for fr in nk_frames(spec, 3, seed=5):
        for preset in PRESETS:
            res = lemma_residuals(fr, preset_coefficients(preset, spec.n))
            assert set(res) == set(LEMMA_TAGS)
            assert max(res.values()) < 1e-8, preset


def test_lemma_r_preset_reduces(registry):
    fr = nk_frames(registry["kenmotsu-warped-5d"], 1)[0]
    o = lemma_oracle(fr, coefficients("r", 5))
    assert float(o["eq-ric-T2"]) == pytest.approx(fr.eps * fr.k * 4)


def test_lemma_eta_form_without_a3_a6(registry):
    fr = nk_frames(registry["kenmotsu-warped-3d"], 1)[0]
    c = coefficients("m-projective", 3)
    o = lemma_oracle(fr, c)
    expected = fr.eps * fr.k * 2 * (c.a1 + c.a2 + c.a4 + c.a5) * np.outer(fr.eta, fr.eta)
    np.testing.assert_allclose(o["eq-eta-xi-X-Y"], expected, atol=1e-14)


def test_concircular_x_xi_xi_zero_on_s5(registry):
    fr = nk_frames(registry["s5"], 1)[0]
    d = lemma_direct(fr, coefficients("concircular", 5))
    assert np.max(np.abs(d["eq-X-xi-xi"])) < 1e-12


def test_generic_frame_rejected(registry):
    fr = frame(registry["random-3d"], (0.1, 0.1, 0.1))
    with pytest.raises(ValueError):
        verify_nullity(fr)


def test_random_metric_reproducible():
    a, b = random_polynomial_metric(7), random_polynomial_metric(7)
    assert a.metric_source() == b.metric_source()
    assert a.metric_source() != random_polynomial_metric(8).metric_source()
    assert a.name == "random-3d-7"
