"""Scalar functionals: Sobolev, weighted, Bourgain and composite norms,
plus the conserved quantities of the flow.

Bracket convention: <x> = 1 + |x| throughout.  Sum-space norms are
computed with the pointwise minimum of the two constituent weights, which
is equivalent to the true infimum-over-decompositions norm within a factor
sqrt(2); every consumer of these values is a ratio meter for which that
constant is irrelevant.

Time-restriction norms are evaluated on windowed trajectories and are
upper-bound surrogates for the corresponding infimum norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import Field, dealias
from .lp import CutoffBank, SpaceTimeField, dyadic_range, project_space
from .symbols import SymbolSpec, eval_dispersion

__all__ = [
    "NormSpec", "MeanNotZeroError", "parse_norm_spec",
    "sobolev", "lowfreq_weighted", "bourgain", "sum_space",
    "tilde_norm", "lp_hs", "linf_hs",
    "composite_ms", "composite_ys", "composite_ztheta", "composite_mtilde12",
    "mass", "hamiltonian", "evaluate_norm",
    "xsb_weight", "fsb_weight",
]


class MeanNotZeroError(ValueError):
    pass


def _bracket(x):
    return 1.0 + np.abs(x)


def _pair_weights(n: int) -> np.ndarray:
    w = np.full(n // 2 + 1, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    return w


# -- spatial norms ----------------------------------------------------

def sobolev(f: Field, s: float) -> float:
    """H^s norm: (length * sum <xi>^{2s} |u_hat|^2)^{1/2}, pairs counted."""
    xi = f.grid.wavenumbers
    w = _pair_weights(f.grid.n)
    return float(np.sqrt(f.grid.length *
                         np.sum(w * _bracket(xi) ** (2.0 * s) * np.abs(f.spectrum) ** 2)))


def lowfreq_weighted(f: Field, theta: float) -> float:
    """Weighted norm with weight (1 + |xi|^{-1/2})(1 + |xi|)^theta.

    Requires a mean-zero field; the weight diverges at xi = 0."""
    norm0 = f.l2_norm()
    if abs(f.spectrum[0]) > 1e-12 * max(norm0, 1e-300):
        raise MeanNotZeroError(
            f"zero-mode coefficient {f.spectrum[0]:.3g} is not negligible")
    xi = f.grid.wavenumbers[1:]
    w = _pair_weights(f.grid.n)[1:]
    weight = (1.0 + np.abs(xi) ** -0.5) * _bracket(xi) ** theta
    return float(np.sqrt(f.grid.length *
                         np.sum(w * (weight * np.abs(f.spectrum[1:])) ** 2)))


# -- space-time weights and norms -------------------------------------

def xsb_weight(xi, sigma, s: float, b: float) -> np.ndarray:
    return _bracket(sigma) ** b * _bracket(xi) ** s


def fsb_weight(xi, sigma, s: float, b: float, alpha: float) -> np.ndarray:
    """Pointwise-min weight of X^{s-(a+1)/2, b+1/2} + X^{s-(1+a)/8, b+1/8}."""
    wa = xsb_weight(xi, sigma, s - (alpha + 1.0) / 2.0, b + 0.5)
    wb = xsb_weight(xi, sigma, s - (1.0 + alpha) / 8.0, b + 0.125)
    return np.minimum(wa, wb)


def _spacetime_weighted(f: SpaceTimeField, weight: np.ndarray) -> float:
    measure = f.window * f.grid.length
    return float(np.sqrt(measure * np.sum((weight * np.abs(f.spectrum2d)) ** 2)))


def bourgain(f: SpaceTimeField, s: float, b: float, spec: SymbolSpec) -> float:
    """X^{s,b} norm with weight <tau - p(xi)>^b <xi>^s on the 2-D spectrum."""
    xi = f.grid.full_wavenumbers[None, :]
    return _spacetime_weighted(f, xsb_weight(xi, f.sigma(spec), s, b))


def sum_space(f: SpaceTimeField, s: float, b: float, alpha: float,
              spec: SymbolSpec) -> float:
    """F^{s,b} sum-space norm via the pointwise-min weight."""
    xi = f.grid.full_wavenumbers[None, :]
    return _spacetime_weighted(f, fsb_weight(xi, f.sigma(spec), s, b, alpha))


def _active_dyadics(f: SpaceTimeField) -> list:
    xi = f.grid.wavenumbers
    return dyadic_range(xi[1], xi[-1])


def _block_lp_hs(block: SpaceTimeField, p, s: float) -> float:
    per_t = np.array([sobolev(block.row(j), s) for j in range(block.m)])
    if p == np.inf or p == "inf":
        return float(per_t.max())
    if p == 2:
        return float(np.sqrt(block.dt * np.sum(per_t ** 2)))
    raise ValueError(f"unsupported time exponent {p!r}")


def lp_hs(f: SpaceTimeField, p, s: float) -> float:
    """Mixed L^p_t H^s_x norm; L^infinity in time is the max over samples."""
    return _block_lp_hs(f, p, s)


def linf_hs(f: SpaceTimeField, s: float) -> float:
    return _block_lp_hs(f, np.inf, s)


def tilde_norm(f: SpaceTimeField, p, s: float,
               bank: CutoffBank = CutoffBank("sharp")) -> float:
    """l^2-over-dyadic-blocks refinement of L^p_t H^s (sharp blocks by
    default so the p = 2 case reproduces L^2_t H^s exactly)."""
    total = 0.0
    for N in _active_dyadics(f):
        block = project_space(f, N, bank)
        total += _block_lp_hs(block, p, s) ** 2
    return float(np.sqrt(total))


def tilde_linf_lowfreq(f: SpaceTimeField, theta: float,
                       bank: CutoffBank = CutoffBank("sharp")) -> float:
    """l^2 over dyadic blocks of L^inf_t of the low-frequency weighted norm."""
    total = 0.0
    for N in _active_dyadics(f):
        block = project_space(f, N, bank)
        per_t = max(lowfreq_weighted(block.row(j), theta) for j in range(block.m))
        total += per_t ** 2
    return float(np.sqrt(total))


# -- composite spaces -------------------------------------------------

def composite_ms(f: SpaceTimeField, s: float, spec: SymbolSpec) -> dict:
    """M^s = L^inf_t H^s + X^{s-1,1}; reported as components and sum."""
    parts = {"linf_hs": linf_hs(f, s), "xsb": bourgain(f, s - 1.0, 1.0, spec)}
    parts["total"] = parts["linf_hs"] + parts["xsb"]
    return parts


def composite_ys(f: SpaceTimeField, s: float, alpha: float, spec: SymbolSpec,
                 variant: str = "sum") -> dict:
    """Y^s = L^inf_t H^s + F^{s,alpha,1/2}; ``variant='single'`` replaces the
    sum space by its first constituent X^{s-(alpha+1)/2, 1}."""
    if variant == "sum":
        second = sum_space(f, s, 0.5, alpha, spec)
    elif variant == "single":
        second = bourgain(f, s - (alpha + 1.0) / 2.0, 1.0, spec)
    else:
        raise ValueError(f"unknown Y^s variant {variant!r}")
    parts = {"linf_hs": linf_hs(f, s), "fsb": second}
    parts["total"] = parts["linf_hs"] + parts["fsb"]
    return parts


def composite_ztheta(f: SpaceTimeField, theta: float, alpha: float,
                     spec: SymbolSpec) -> dict:
    """Z^theta = tilde-L^inf_t Hbar^theta + F^{theta,1/2}."""
    parts = {"tilde_linf_hbar": tilde_linf_lowfreq(f, theta),
             "fsb": sum_space(f, theta, 0.5, alpha, spec)}
    parts["total"] = parts["tilde_linf_hbar"] + parts["fsb"]
    return parts


def composite_mtilde12(f: SpaceTimeField, spec: SymbolSpec) -> dict:
    """tilde-M^{1/2} = tilde-L^inf_t H^{1/2} + X^{-1/2,1}."""
    parts = {"tilde_linf_hs": tilde_norm(f, np.inf, 0.5),
             "xsb": bourgain(f, -0.5, 1.0, spec)}
    parts["total"] = parts["tilde_linf_hs"] + parts["xsb"]
    return parts


# -- conserved quantities ---------------------------------------------

def mass(f: Field) -> float:
    """integral u^2 dx by collocation quadrature (fixed summation order)."""
    return float(f.grid.dx * np.sum(f.values * f.values))


def hamiltonian(f: Field, spec: SymbolSpec) -> float:
    """integral |Lambda^{alpha/2} u|^2 + (1/3) u^3 dx, where Lambda has the
    multiplier |p(xi)/xi|^{1/2} (limit value at xi = 0)."""
    xi = f.grid.wavenumbers
    lam2 = np.empty_like(xi)
    lam2[1:] = np.abs(eval_dispersion(spec, xi[1:]) / xi[1:])
    eps = 1e-8 * max(xi[1], 1.0)
    lam2[0] = abs(eval_dispersion(spec, eps) / eps)
    w = _pair_weights(f.grid.n)
    quad = float(f.grid.length * np.sum(w * lam2 * np.abs(f.spectrum) ** 2))
    ud = dealias(f).values
    cubic = float(f.grid.dx * np.sum(ud ** 3)) / 3.0
    return quad + cubic


# -- norm-spec strings ------------------------------------------------

@dataclass(frozen=True)
class NormSpec:
    kind: str
    params: dict


_NORM_KINDS = {
    "Hs": ("s",), "HbarTheta": ("theta",), "Xsb": ("s", "b"),
    "Fsb": ("s", "b", "alpha"), "TildeLpHs": ("p", "s"), "LpHs": ("p", "s"),
    "Ms": ("s",), "Ys": ("s", "alpha"), "Ztheta": ("theta", "alpha"),
    "Mtilde12": (),
}


def parse_norm_spec(text: str) -> NormSpec:
    """Parse e.g. ``Xsb:s=-0.5,b=1`` or ``Hs:s=1``."""
    head, _, rest = text.strip().partition(":")
    if head not in _NORM_KINDS:
        raise ValueError(f"unknown norm kind {head!r}; known: {sorted(_NORM_KINDS)}")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValueError(f"malformed norm parameter {item!r}")
            key = key.strip()
            params[key] = np.inf if val.strip() in ("inf", "oo") else float(val)
    missing = [k for k in _NORM_KINDS[head] if k not in params]
    if missing:
        raise ValueError(f"norm {head} missing parameters {missing}")
    extra = [k for k in params if k not in _NORM_KINDS[head] and k != "variant"]
    if extra:
        raise ValueError(f"norm {head} got unknown parameters {extra}")
    return NormSpec(kind=head, params=params)


def evaluate_norm(ns: NormSpec, f, spec: Optional[SymbolSpec] = None):
    """Evaluate a NormSpec on a Field (Hs, HbarTheta) or SpaceTimeField."""
    p = ns.params
    if ns.kind == "Hs":
        return sobolev(f, p["s"])
    if ns.kind == "HbarTheta":
        return lowfreq_weighted(f, p["theta"])
    if ns.kind == "TildeLpHs":
        return tilde_norm(f, p["p"], p["s"])
    if ns.kind == "LpHs":
        return lp_hs(f, p["p"], p["s"])
    if spec is None:
        raise ValueError(f"norm {ns.kind} requires a dispersion symbol")
    if ns.kind == "Xsb":
        return bourgain(f, p["s"], p["b"], spec)
    if ns.kind == "Fsb":
        return sum_space(f, p["s"], p["b"], p["alpha"], spec)
    if ns.kind == "Ms":
        return composite_ms(f, p["s"], spec)
    if ns.kind == "Ys":
        variant = "single" if p.get("variant", 0) == 1 else "sum"
        return composite_ys(f, p["s"], p["alpha"], spec, variant=variant)
    if ns.kind == "Ztheta":
        return composite_ztheta(f, p["theta"], p["alpha"], spec)
    if ns.kind == "Mtilde12":
        return composite_mtilde12(f, spec)
    raise ValueError(f"unknown norm kind {ns.kind!r}")
