import math

import numpy as np
import pytest

from dispersolve.symbols import (HypothesisCertificate, OutOfRangeError,
                                 ResolutionError, SymbolError, SymbolSpec,
                                 certify_hypothesis1, check_lemma21,
                                 eval_dispersion, eval_dissipation,
                                 parse_symbol, resonance)


def test_pure_power_values():
    spec = SymbolSpec.pure_power(alpha=1.0)
    assert eval_dispersion(spec, 3.0) == 9.0
    assert eval_dispersion(spec, -3.0) == -9.0
    spec2 = SymbolSpec.pure_power(alpha=2.0, sign=-1)
    assert eval_dispersion(spec2, 2.0) == -8.0


def test_kdv_matches_negative_cubic():
    spec = SymbolSpec.kdv()
    xi = np.linspace(-10, 10, 41)
    assert np.allclose(eval_dispersion(spec, xi), -xi ** 3)
    pp = SymbolSpec.pure_power(alpha=2.0, sign=-1)
    assert np.allclose(eval_dispersion(spec, xi), eval_dispersion(pp, xi))


def test_symbols_are_odd():
    xi = np.geomspace(1e-3, 50.0, 40)
    for spec in (SymbolSpec.pure_power(1.5), SymbolSpec.ilw(),
                 SymbolSpec.smith(), SymbolSpec.kdv()):
        assert np.allclose(eval_dispersion(spec, -xi),
                           -eval_dispersion(spec, xi), rtol=1e-12)


def test_ilw_series_and_tails():
    spec = SymbolSpec.ilw()
    # small xi: p = xi^2 coth(xi) -> xi * (1 + xi^2/3 - ...)
    assert eval_dispersion(spec, 1e-6) == pytest.approx(1e-6, rel=1e-9)
    # the series branch agrees with the direct formula at the crossover
    xi = 2e-4
    direct = xi * (xi / math.tanh(xi))
    assert eval_dispersion(spec, xi) == pytest.approx(direct, rel=1e-12)
    # large xi: coth -> 1 so p -> xi |xi|, with no overflow
    assert eval_dispersion(spec, 1000.0) == pytest.approx(1000.0 ** 2)
    assert math.isfinite(eval_dispersion(spec, 1e8))


def test_smith_interpolates_between_orders():
    spec = SymbolSpec.smith()
    assert eval_dispersion(spec, 2.0) == pytest.approx(2.0 * math.sqrt(5.0))
    # low frequency ~ xi, high frequency ~ xi^2
    assert eval_dispersion(spec, 1e-8) == pytest.approx(1e-8, rel=1e-12)
    assert eval_dispersion(spec, 1e6) == pytest.approx(1e12, rel=1e-9)


def test_dissipation_symbols():
    d = SymbolSpec.dissipation_homogeneous(beta=2.0)
    j = SymbolSpec.dissipation_inhomogeneous(beta=1.0)
    assert eval_dissipation(d, -3.0) == 9.0
    assert eval_dissipation(j, 0.0) == 1.0
    assert eval_dissipation(j, 2.0) == pytest.approx(math.sqrt(5.0))
    with pytest.raises(SymbolError):
        eval_dissipation(SymbolSpec.kdv(), 1.0)
    with pytest.raises(SymbolError):
        eval_dispersion(d, 1.0)


def test_tabulated_roundtrip_and_range():
    xi = np.linspace(0.0, 100.0, 2001)
    spec = SymbolSpec.tabulated(xi, xi * np.sqrt(xi * xi + 1.0), alpha=1.0)
    probe = np.linspace(0.5, 99.5, 97)
    exact = probe * np.sqrt(probe ** 2 + 1.0)
    assert np.allclose(eval_dispersion(spec, probe), exact, rtol=1e-6)
    with pytest.raises(OutOfRangeError):
        eval_dispersion(spec, 101.0)


def test_resonance_closed_forms():
    bo = SymbolSpec.pure_power(alpha=1.0)
    # for positive arguments: (a+b)^2 - a^2 - b^2 = 2ab
    for a, b in [(1.0, 2.0), (3.5, 10.0), (8.0, 8.0)]:
        assert resonance(bo, a, b) == pytest.approx(2.0 * a * b)
    kdv = SymbolSpec.kdv()
    for a, b in [(1.0, 2.0), (-3.0, 5.0)]:
        assert resonance(kdv, a, b) == pytest.approx(-3.0 * a * b * (a + b))


def test_certify_bo_positive_quadrant_is_one_two():
    bo = SymbolSpec.pure_power(alpha=1.0)
    cert = certify_hypothesis1(bo, 1.0, xi_range=(1.0, 1e10),
                               lambda_range=(1e-6, 1.0), samples_per_axis=40,
                               region="positive_quadrant", xi_floor=1.0)
    assert cert.verdict == "certified"
    assert cert.ratio_min == pytest.approx(1.0, abs=1e-9)
    assert cert.ratio_max == pytest.approx(2.0, abs=1e-9)


def test_certify_smith_and_ilw():
    for spec in (SymbolSpec.smith(), SymbolSpec.ilw()):
        cert = certify_hypothesis1(spec, 1.0, xi_range=(8.0, 1024.0),
                                   lambda_range=(1.0 / 64.0, 1.0),
                                   samples_per_axis=24, region="xi1_large")
        assert cert.verdict == "certified"
        assert cert.ratio_min > 1e-3


def test_refuted_certificate_carries_witness():
    # an even-ish fake dispersion makes the resonance degenerate: p linear
    xi = np.linspace(0.0, 4096.0, 4097)
    lin = SymbolSpec.tabulated(xi, xi, alpha=1.0)
    cert = certify_hypothesis1(lin, 1.0, xi_range=(8.0, 1024.0),
                               lambda_range=(1.0, 1.0), samples_per_axis=12,
                               region="positive_quadrant")
    assert cert.verdict == "refuted"
    assert cert.witness is not None


def test_check_lemma21_families():
    for spec in (SymbolSpec.pure_power(1.5), SymbolSpec.smith(),
                 SymbolSpec.ilw(), SymbolSpec.kdv()):
        cert = check_lemma21(spec, spec.dispersion_order,
                             xi_range=(8.0, 1024.0), samples=64)
        assert cert.verdict == "certified", spec.kind
        assert "first_derivative" in cert.components
        assert "second_derivative" in cert.components


def test_check_lemma21_coarse_table_raises():
    xi = np.linspace(0.0, 2000.0, 6)
    spec = SymbolSpec.tabulated(xi, xi ** 2 / 2000.0, alpha=1.0)
    with pytest.raises(ResolutionError):
        check_lemma21(spec, 1.0, xi_range=(8.0, 1024.0), samples=16)


def test_parse_symbol_forms():
    assert parse_symbol("kdv").kind == "kdv"
    assert parse_symbol("ilw").kind == "ilw"
    assert parse_symbol("smith").kind == "smith"
    pp = parse_symbol("purepower:alpha=1.5")
    assert pp.alpha == 1.5 and pp.sign == 1
    pm = parse_symbol("purepower:alpha=1,sign=-1")
    assert pm.sign == -1
    d = parse_symbol("d:beta=2", role="dissipation")
    assert d.kind == "d" and d.beta == 2.0
    with pytest.raises(SymbolError):
        parse_symbol("nosuch")


def test_invalid_specs_rejected():
    with pytest.raises(SymbolError):
        SymbolSpec.pure_power(alpha=-1.0)
    with pytest.raises(SymbolError):
        SymbolSpec(kind="purepower", alpha=1.0, sign=3)
    with pytest.raises(SymbolError):
        SymbolSpec.tabulated([0.0, 1.0], [0.0, 1.0])
