"""Dispersion and dissipation symbol families.

A dispersion symbol is an odd real function p(xi) with p(0) = 0; the
associated linear operator is the Fourier multiplier by i*p(xi).  A
dissipation symbol is an even nonnegative function q(xi).  The module also
evaluates the resonance function

    Omega(xi1, xi2) = p(xi1 + xi2) - p(xi1) - p(xi2)

and provides numerical certifiers for the scaling bound

    lambda^(alpha+1) |Omega(xi1/lambda, xi2/lambda)| ~ |xi|_min |xi|_max^alpha

and for the derivative criterion |p'| ~ |xi|^alpha, |p''| ~ |xi|^(alpha-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

__all__ = [
    "SymbolSpec",
    "HypothesisCertificate",
    "SymbolError",
    "OutOfRangeError",
    "ResolutionError",
    "eval_dispersion",
    "eval_dissipation",
    "resonance",
    "certify_hypothesis1",
    "check_lemma21",
    "parse_symbol",
]


class SymbolError(ValueError):
    """Invalid symbol specification or misuse of a symbol."""


class OutOfRangeError(SymbolError):
    """Tabulated symbol queried outside its table range."""


class ResolutionError(SymbolError):
    """Tabulated symbol too coarse for the requested finite difference."""


# Relative half-width below which the ILW symbol switches to its series.
_ILW_SERIES_CUT = 1e-4


@dataclass(frozen=True)
class SymbolSpec:
    """One dispersion or dissipation symbol.

    ``kind`` is one of ``purepower``, ``ilw``, ``smith``, ``kdv``,
    ``table`` (dispersion side) or ``d`` / ``j`` (homogeneous |xi|^beta and
    inhomogeneous (1+xi^2)^(beta/2) dissipation).
    """

    kind: str
    role: str = "dispersion"
    alpha: Optional[float] = None
    sign: int = 1
    beta: Optional[float] = None
    table_xi: Optional[tuple] = field(default=None, repr=False)
    table_val: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        if self.role not in ("dispersion", "dissipation"):
            raise SymbolError(f"unknown role {self.role!r}")
        if self.role == "dispersion":
            if self.kind not in ("purepower", "ilw", "smith", "kdv", "table"):
                raise SymbolError(f"unknown dispersion kind {self.kind!r}")
            if self.kind == "purepower":
                if self.alpha is None or self.alpha <= 0:
                    raise SymbolError("purepower requires alpha > 0")
                if self.sign not in (1, -1):
                    raise SymbolError("purepower sign must be +1 or -1")
        else:
            if self.kind not in ("d", "j", "table"):
                raise SymbolError(f"unknown dissipation kind {self.kind!r}")
            if self.kind in ("d", "j") and (self.beta is None or self.beta < 0):
                raise SymbolError("dissipation requires beta >= 0")
        if self.kind == "table":
            if self.table_xi is None or self.table_val is None:
                raise SymbolError("tabulated symbol requires samples")
            xi = np.asarray(self.table_xi, dtype=float)
            if xi.ndim != 1 or xi.size < 4 or np.any(np.diff(xi) <= 0):
                raise SymbolError("table wavenumbers must be strictly increasing, >= 4 points")

    # -- constructors -------------------------------------------------

    @classmethod
    def pure_power(cls, alpha: float, sign: int = 1) -> "SymbolSpec":
        return cls(kind="purepower", alpha=float(alpha), sign=sign)

    @classmethod
    def ilw(cls) -> "SymbolSpec":
        return cls(kind="ilw", alpha=1.0)

    @classmethod
    def smith(cls) -> "SymbolSpec":
        return cls(kind="smith", alpha=1.0)

    @classmethod
    def kdv(cls) -> "SymbolSpec":
        # equivalent to pure_power(2, -1): the operator d^3/dx^3
        return cls(kind="kdv", alpha=2.0, sign=-1)

    @classmethod
    def tabulated(cls, xi, values, role: str = "dispersion", alpha: Optional[float] = None) -> "SymbolSpec":
        return cls(kind="table", role=role, alpha=alpha,
                   table_xi=tuple(float(x) for x in xi),
                   table_val=tuple(float(v) for v in values))

    @classmethod
    def dissipation_homogeneous(cls, beta: float) -> "SymbolSpec":
        return cls(kind="d", role="dissipation", beta=float(beta))

    @classmethod
    def dissipation_inhomogeneous(cls, beta: float) -> "SymbolSpec":
        return cls(kind="j", role="dissipation", beta=float(beta))

    # -- helpers ------------------------------------------------------

    @property
    def dispersion_order(self) -> float:
        """High-frequency exponent alpha of the symbol family."""
        if self.alpha is not None:
            return self.alpha
        raise SymbolError(f"no alpha declared for {self.kind!r}")

    def _interpolator(self) -> PchipInterpolator:
        # monotone cubic, no extrapolation
        return PchipInterpolator(np.asarray(self.table_xi), np.asarray(self.table_val),
                                 extrapolate=False)

    def table_spacing(self) -> float:
        return float(np.max(np.diff(np.asarray(self.table_xi))))


def _ilw_xi_coth_xi(xi: np.ndarray) -> np.ndarray:
    """xi * coth(xi), with the removable singularity handled by series."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty_like(xi)
    small = np.abs(xi) < _ILW_SERIES_CUT
    large = np.abs(xi) > 20.0
    mid = ~(small | large)
    xs = xi[small]
    out[small] = 1.0 + xs * xs / 3.0 - xs ** 4 / 45.0
    out[large] = np.abs(xi[large])  # coth(|xi|) = 1 to machine precision
    xm = xi[mid]
    out[mid] = xm / np.tanh(xm)
    return out


def eval_dispersion(spec: SymbolSpec, xi):
    """Evaluate the dispersion symbol p(xi).  Accepts scalars or arrays."""
    if spec.role != "dispersion":
        raise SymbolError("eval_dispersion requires a dispersion symbol")
    x = np.asarray(xi, dtype=float)
    if spec.kind == "purepower":
        out = spec.sign * x * np.abs(x) ** spec.alpha
    elif spec.kind == "kdv":
        out = -x ** 3
    elif spec.kind == "smith":
        out = x * np.sqrt(x * x + 1.0)
    elif spec.kind == "ilw":
        out = x * _ilw_xi_coth_xi(x)
    else:  # table
        out = spec._interpolator()(x)
        if np.any(np.isnan(out)):
            raise OutOfRangeError(
                f"tabulated symbol queried outside [{spec.table_xi[0]}, {spec.table_xi[-1]}]")
    if np.isscalar(xi):
        return float(out)
    return out


def eval_dissipation(spec: SymbolSpec, xi):
    """Evaluate the dissipation symbol q(xi) >= 0."""
    if spec.role != "dissipation":
        raise SymbolError("eval_dissipation requires a dissipation symbol")
    x = np.asarray(xi, dtype=float)
    if spec.kind == "d":
        out = np.abs(x) ** spec.beta
    elif spec.kind == "j":
        out = (1.0 + x * x) ** (spec.beta / 2.0)
    else:  # table
        out = spec._interpolator()(np.abs(x))
        if np.any(np.isnan(out)):
            raise OutOfRangeError(
                f"tabulated symbol queried outside [{spec.table_xi[0]}, {spec.table_xi[-1]}]")
    if np.isscalar(xi):
        return float(out)
    return out


def resonance(spec: SymbolSpec, xi1, xi2):
    """Three-term resonance function p(xi1+xi2) - p(xi1) - p(xi2).

    The quadratic and cubic pure powers use factored closed forms instead
    of the literal difference: the naive evaluation loses all significant
    digits when |xi1 + xi2| dwarfs the resonance (e.g. xi2/xi1 ~ 1e-10)."""
    a = np.asarray(xi1, dtype=float)
    b = np.asarray(xi2, dtype=float)
    if spec.kind == "kdv":
        out = -3.0 * a * b * (a + b)
    elif spec.kind == "purepower" and spec.alpha == 2.0:
        out = spec.sign * 3.0 * a * b * (a + b)
    elif spec.kind == "purepower" and spec.alpha == 1.0:
        s = a + b
        same = (a * b) >= 0.0
        big_is_a = np.abs(a) >= np.abs(b)
        # product of the two smallest-magnitude members of {xi1, xi2, xi1+xi2}
        out = spec.sign * 2.0 * np.where(same, a * b,
                                         np.where(big_is_a, b * s, a * s))
    else:
        out = (eval_dispersion(spec, a + b)
               - eval_dispersion(spec, a) - eval_dispersion(spec, b))
    if np.isscalar(xi1) and np.isscalar(xi2):
        return float(out)
    return out


@dataclass(frozen=True)
class HypothesisCertificate:
    """Measured two-sided ratio bounds over a sampled parameter region.

    ``verdict`` is "certified" when the ratio stayed above the certification
    floor on every sampled point, else "refuted" with a witness point.
    """

    family: SymbolSpec
    region: dict
    ratio_min: float
    ratio_max: float
    verdict: str
    witness: Optional[tuple] = None
    components: Optional[dict] = None

    @property
    def constants(self) -> tuple:
        return (self.ratio_min, self.ratio_max)


def _log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    if lo <= 0 or hi < lo:
        raise ValueError("range must satisfy 0 < lo <= hi")
    if hi == lo:
        return np.array([lo])
    return np.geomspace(lo, hi, count)


def certify_hypothesis1(spec: SymbolSpec, alpha: float,
                        xi_range: tuple, lambda_range: tuple,
                        samples_per_axis: int,
                        region: str = "xi1_large",
                        xi_floor: float = 8.0,
                        eps_cert: float = 1e-3) -> HypothesisCertificate:
    """Sweep the scaled resonance ratio over a (lambda, xi1, xi2) grid.

    ``region`` selects the sampled shape:
      * ``positive_quadrant``: xi_floor <= xi2 <= xi1, both positive;
      * ``xi1_large``: |xi1| >= xi_floor, xi2 of either sign and any size
        within xi_range;
      * ``both_large``: |xi1| and |xi2| >= xi_floor, either sign.

    Points with |xi1 + xi2| = 0 are excluded (the comparison weight
    vanishes there).
    """
    if samples_per_axis < 2:
        raise ValueError("need at least 2 samples per axis")
    lo, hi = float(xi_range[0]), float(xi_range[1])
    lam_lo, lam_hi = float(lambda_range[0]), float(lambda_range[1])
    if not (0 < lam_lo <= lam_hi <= 1):
        raise ValueError("lambda_range must lie in (0, 1]")

    if region == "positive_quadrant":
        base = _log_grid(max(lo, xi_floor), hi, samples_per_axis)
        xi1g, xi2g = np.meshgrid(base, base, indexing="ij")
        mask = xi2g <= xi1g
        xi1s, xi2s = xi1g[mask], xi2g[mask]
    elif region in ("xi1_large", "both_large"):
        big = _log_grid(max(lo, xi_floor), hi, samples_per_axis)
        xi1v = np.concatenate([big, -big])
        if region == "both_large":
            xi2v = np.concatenate([big, -big])
        else:
            small = _log_grid(lo, hi, samples_per_axis)
            xi2v = np.concatenate([small, -small])
        xi1g, xi2g = np.meshgrid(xi1v, xi2v, indexing="ij")
        xi1s, xi2s = xi1g.ravel(), xi2g.ravel()
    else:
        raise ValueError(f"unknown region shape {region!r}")

    keep = np.abs(xi1s + xi2s) > 0
    xi1s, xi2s = xi1s[keep], xi2s[keep]
    if xi1s.size == 0:
        raise ValueError("empty sample region")

    lams = _log_grid(lam_lo, lam_hi, samples_per_axis)
    ratio_min = math.inf
    ratio_max = -math.inf
    witness = None
    for lam in lams:
        om = np.abs(resonance(spec, xi1s / lam, xi2s / lam)) * lam ** (alpha + 1.0)
        absmin = np.minimum(np.abs(xi1s), np.minimum(np.abs(xi2s), np.abs(xi1s + xi2s)))
        absmax = np.maximum(np.abs(xi1s), np.maximum(np.abs(xi2s), np.abs(xi1s + xi2s)))
        ratio = om / (absmin * absmax ** alpha)
        i_lo = int(np.argmin(ratio))
        i_hi = int(np.argmax(ratio))
        if ratio[i_lo] < ratio_min:
            ratio_min = float(ratio[i_lo])
            if ratio_min < eps_cert:
                witness = (float(lam), float(xi1s[i_lo]), float(xi2s[i_lo]))
        ratio_max = max(ratio_max, float(ratio[i_hi]))

    verdict = "certified" if ratio_min >= eps_cert else "refuted"
    return HypothesisCertificate(
        family=spec,
        region={"shape": region, "xi_range": (lo, hi), "lambda_range": (lam_lo, lam_hi),
                "xi_floor": xi_floor, "samples_per_axis": samples_per_axis,
                "eps_cert": eps_cert},
        ratio_min=ratio_min, ratio_max=ratio_max, verdict=verdict, witness=witness)


def _derivatives(spec: SymbolSpec, xi: np.ndarray) -> tuple:
    """(p', p'') on the sample points, closed-form where available."""
    if spec.kind in ("purepower", "kdv"):
        a = spec.dispersion_order
        sgn = -1 if spec.kind == "kdv" else spec.sign
        d1 = sgn * (a + 1.0) * np.abs(xi) ** a
        d2 = sgn * (a + 1.0) * a * np.abs(xi) ** (a - 1.0) * np.sign(xi)
        return d1, d2
    if spec.kind == "smith":
        # p = xi sqrt(xi^2+1)
        r = np.sqrt(xi * xi + 1.0)
        d1 = r + xi * xi / r
        d2 = 3.0 * xi / r - xi ** 3 / r ** 3
        return d1, d2
    h = 1e-4 * np.abs(xi)
    if spec.kind == "table" and spec.table_spacing() > 1e-2 * float(np.min(np.abs(xi))):
        raise ResolutionError("table spacing too coarse for second differences")
    pp = eval_dispersion(spec, xi + h)
    pm = eval_dispersion(spec, xi - h)
    p0 = eval_dispersion(spec, xi)
    return (pp - pm) / (2.0 * h), (pp - 2.0 * p0 + pm) / (h * h)


def check_lemma21(spec: SymbolSpec, alpha: float, xi_range: tuple,
                  samples: int, xi_floor: float = 8.0,
                  eps_cert: float = 1e-3) -> HypothesisCertificate:
    """Measure |p'|/|xi|^alpha and |p''|/|xi|^(alpha-1) over a log grid."""
    lo, hi = max(float(xi_range[0]), xi_floor), float(xi_range[1])
    xi = _log_grid(lo, hi, samples)
    d1, d2 = _derivatives(spec, xi)
    r1 = np.abs(d1) / np.abs(xi) ** alpha
    r2 = np.abs(d2) / np.abs(xi) ** (alpha - 1.0)
    components = {
        "first_derivative": (float(r1.min()), float(r1.max())),
        "second_derivative": (float(r2.min()), float(r2.max())),
    }
    ratio_min = min(components["first_derivative"][0], components["second_derivative"][0])
    ratio_max = max(components["first_derivative"][1], components["second_derivative"][1])
    verdict = "certified" if ratio_min >= eps_cert else "refuted"
    witness = None
    if verdict == "refuted":
        idx = int(np.argmin(np.minimum(r1, r2)))
        witness = (float(xi[idx]),)
    return HypothesisCertificate(
        family=spec,
        region={"shape": "derivative_ray", "xi_range": (lo, hi), "samples": samples,
                "xi_floor": xi_floor, "eps_cert": eps_cert},
        ratio_min=ratio_min, ratio_max=ratio_max, verdict=verdict,
        witness=witness, components=components)


def parse_symbol(text: str, role: str = "dispersion") -> SymbolSpec:
    """Parse a config string like ``purepower:alpha=1.5``, ``ilw``, ``smith``,
    ``kdv``, ``table:path=...``, ``d:beta=2`` or ``j:beta=1``."""
    head, _, rest = text.strip().partition(":")
    head = head.lower()
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not _:
                raise SymbolError(f"malformed symbol parameter {item!r} in {text!r}")
            params[key.strip()] = val.strip()

    def popfloat(key, default=None):
        if key in params:
            return float(params.pop(key))
        if default is None:
            raise SymbolError(f"symbol {head!r} requires parameter {key!r}")
        return default

    if head == "purepower":
        spec = SymbolSpec.pure_power(popfloat("alpha"), int(popfloat("sign", 1.0)))
    elif head == "ilw":
        spec = SymbolSpec.ilw()
    elif head == "smith":
        spec = SymbolSpec.smith()
    elif head == "kdv":
        spec = SymbolSpec.kdv()
    elif head == "d":
        spec = SymbolSpec.dissipation_homogeneous(popfloat("beta"))
    elif head == "j":
        spec = SymbolSpec.dissipation_inhomogeneous(popfloat("beta"))
    elif head == "table":
        path = params.pop("path", None)
        if path is None:
            raise SymbolError("table symbol requires path=")
        data = np.loadtxt(path)
        if data.ndim != 2 or data.shape[1] != 2:
            raise SymbolError(f"table file {path} must have two columns")
        alpha = float(params.pop("alpha")) if "alpha" in params else None
        spec = SymbolSpec.tabulated(data[:, 0], data[:, 1], role=role, alpha=alpha)
    else:
        raise SymbolError(f"unknown symbol family {head!r}")
    if params:
        raise SymbolError(f"unused symbol parameters {sorted(params)} in {text!r}")
    if spec.role != role:
        raise SymbolError(f"symbol {text!r} has role {spec.role}, expected {role}")
    return spec
