import math

import numpy as np
import pytest

from dispersolve.grid import Field, Grid
from dispersolve.lp import SpaceTimeField
from dispersolve.norms import (MeanNotZeroError, bourgain, composite_ms,
                               composite_mtilde12, composite_ys,
                               composite_ztheta, evaluate_norm, fsb_weight,
                               hamiltonian, linf_hs, lowfreq_weighted, lp_hs,
                               mass, parse_norm_spec, sobolev, sum_space,
                               tilde_norm, xsb_weight)
from dispersolve.symbols import SymbolSpec


@pytest.fixture
def grid():
    return Grid(length=2.0 * np.pi, n=64)


BO = SymbolSpec.pure_power(alpha=1.0, sign=-1)


def test_sobolev_single_mode(grid):
    for k, s in [(1, 0.0), (3, 1.0), (5, -0.5)]:
        f = Field.from_values(grid, np.cos(k * grid.x))
        expected = math.sqrt(math.pi) * (1.0 + k) ** s
        assert sobolev(f, s) == pytest.approx(expected, rel=1e-12)


def test_sobolev_zero_s_is_l2(grid):
    rng = np.random.default_rng(0)
    f = Field.from_values(grid, rng.standard_normal(grid.n))
    assert sobolev(f, 0.0) == pytest.approx(f.l2_norm(), rel=1e-12)


def test_lowfreq_weighted_single_mode(grid):
    f = Field.from_values(grid, np.cos(2 * grid.x))
    w = (1.0 + 2.0 ** -0.5) * 3.0 ** 0.25
    assert lowfreq_weighted(f, 0.25) == pytest.approx(w * math.sqrt(math.pi),
                                                      rel=1e-12)


def test_lowfreq_weighted_rejects_mean(grid):
    f = Field.from_values(grid, 1.0 + np.cos(grid.x))
    with pytest.raises(MeanNotZeroError):
        lowfreq_weighted(f, 0.0)


def _free_mode(grid, k, sigma_shift=0.0, m=64):
    """cos(k x - (p(k) + shift) t) on a 2 pi time window: its space-time
    spectrum sits exactly at modulation sigma = -shift (integer lattice)."""
    dt = 2.0 * np.pi / m
    t = dt * np.arange(m)
    p = float(-k * abs(k))     # BO sign -1 dispersion, integer for integer k
    vals = np.cos(k * grid.x[None, :] - (p + sigma_shift) * t[:, None])
    return SpaceTimeField(grid=grid, t0=0.0, dt=dt, values=vals)


def test_bourgain_free_solution_sits_at_zero_modulation(grid):
    u = _free_mode(grid, 3)
    l2 = u.l2_norm()
    # zero modulation: the <sigma>^b factor is inert for every b
    for b in (0.0, 0.5, 1.0):
        assert bourgain(u, 0.0, b, BO) == pytest.approx(l2, rel=1e-10)
    assert bourgain(u, 1.0, 0.5, BO) == pytest.approx(4.0 * l2, rel=1e-10)


def test_bourgain_shifted_mode_weights_exactly(grid):
    shift = 5.0
    u = _free_mode(grid, 2, sigma_shift=shift)
    l2 = u.l2_norm()
    for b in (0.0, 0.5, 1.0):
        expected = (1.0 + shift) ** b * l2
        assert bourgain(u, 0.0, b, BO) == pytest.approx(expected, rel=1e-10)


def test_sum_space_is_min_of_weights(grid):
    shift, k, alpha = 7.0, 3, 1.0
    u = _free_mode(grid, k, sigma_shift=shift)
    l2 = u.l2_norm()
    s, b = 0.25, 0.5
    wa = (1.0 + shift) ** (b + 0.5) * (1.0 + k) ** (s - (alpha + 1) / 2.0)
    wb = (1.0 + shift) ** (b + 0.125) * (1.0 + k) ** (s - (1 + alpha) / 8.0)
    assert sum_space(u, s, b, alpha, BO) == pytest.approx(min(wa, wb) * l2,
                                                          rel=1e-10)
    xi = np.array([3.0]); sg = np.array([7.0])
    assert fsb_weight(xi, sg, s, b, alpha)[0] == pytest.approx(min(wa, wb))
    assert xsb_weight(xi, sg, 1.0, 1.0)[0] == pytest.approx(32.0)


def test_tilde_l2_reproduces_l2hs(grid):
    rng = np.random.default_rng(4)
    vals = rng.standard_normal((32, grid.n))
    vals -= vals.mean(axis=1, keepdims=True)      # mean-zero rows
    u = SpaceTimeField(grid=grid, t0=0.0, dt=0.1, values=vals)
    for s in (0.0, 0.75):
        assert tilde_norm(u, 2, s) == pytest.approx(lp_hs(u, 2, s), rel=1e-10)


def test_tilde_linf_at_most_sqrt_blocks(grid):
    u = _free_mode(grid, 4)
    # single dyadic block: the refinement coincides with the plain norm
    assert tilde_norm(u, np.inf, 0.0) == pytest.approx(linf_hs(u, 0.0),
                                                       rel=1e-10)


def test_composites_report_components(grid):
    u = _free_mode(grid, 2)
    ms = composite_ms(u, 0.5, BO)
    assert ms["total"] == pytest.approx(ms["linf_hs"] + ms["xsb"])
    ys = composite_ys(u, 0.5, 1.0, BO)
    assert set(ys) == {"linf_hs", "fsb", "total"}
    # at large modulation the sum space picks the second constituent, so
    # the two variants genuinely differ
    u_far = _free_mode(grid, 2, sigma_shift=40.0)
    ys_far = composite_ys(u_far, 0.5, 1.0, BO)
    ys_single = composite_ys(u_far, 0.5, 1.0, BO, variant="single")
    assert ys_single["fsb"] > ys_far["fsb"] * 1.05
    zt = composite_ztheta(u, 0.25, 1.0, BO)
    assert zt["total"] == pytest.approx(zt["tilde_linf_hbar"] + zt["fsb"])
    mt = composite_mtilde12(u, BO)
    assert mt["total"] == pytest.approx(mt["tilde_linf_hs"] + mt["xsb"])
    with pytest.raises(ValueError):
        composite_ys(u, 0.5, 1.0, BO, variant="nosuch")


def test_mass_and_hamiltonian_closed_forms(grid):
    f = Field.from_values(grid, np.cos(grid.x))
    assert mass(f) == pytest.approx(math.pi, rel=1e-12)
    # BO: Lambda weight |p(xi)/xi| = |xi|; cos^3 integrates to zero
    assert hamiltonian(f, BO) == pytest.approx(math.pi, rel=1e-10)
    g = Field.from_values(grid, np.cos(2 * grid.x))
    assert hamiltonian(g, BO) == pytest.approx(2.0 * math.pi, rel=1e-10)
    # KdV-type weight xi^2
    assert hamiltonian(g, SymbolSpec.kdv()) == pytest.approx(4.0 * math.pi,
                                                             rel=1e-10)


def test_hamiltonian_cubic_term(grid):
    # u = 1 + cos x: integral u^3/3 = (2 pi + 3 pi)/3; quad term: weight at
    # zero mode is the xi -> 0 limit of |p/xi| = |xi| -> 0 for BO
    f = Field.from_values(grid, 1.0 + np.cos(grid.x))
    expected = math.pi + (2.0 * math.pi + 3.0 * math.pi) / 3.0
    assert hamiltonian(f, BO) == pytest.approx(expected, rel=1e-8)


def test_parse_norm_spec_and_dispatch(grid):
    ns = parse_norm_spec("Hs:s=1.5")
    assert ns.kind == "Hs" and ns.params["s"] == 1.5
    f = Field.from_values(grid, np.cos(grid.x))
    assert evaluate_norm(ns, f) == pytest.approx(sobolev(f, 1.5))
    u = _free_mode(grid, 2)
    ns2 = parse_norm_spec("Xsb:s=-0.5,b=1")
    assert evaluate_norm(ns2, u, BO) == pytest.approx(bourgain(u, -0.5, 1.0, BO))
    ns3 = parse_norm_spec("LpHs:p=inf,s=0")
    assert evaluate_norm(ns3, u) == pytest.approx(linf_hs(u, 0.0))
    with pytest.raises(ValueError):
        parse_norm_spec("Nope:s=1")
