"""Dyadic cutoffs, frequency/modulation projectors and pseudo-products.

The cutoff bank is built from one even bump eta with eta = 1 on [-1, 1] and
support in [-2, 2]; phi(x) = eta(x) - eta(2x) generates the dyadic partition
sum_N phi(x/N) = 1 for x != 0.  Every projector exists in a ``smooth``
variant (the C-infinity bump) and a ``sharp`` variant (indicators of
(M/2, M]), the latter for tests whose point is exact vanishing.

Modulation projectors act on the two-dimensional spectrum of a space-time
field through the distance sigma(tau, xi) = tau - p(xi) to the dispersion
surface.  The temporal transform uses the e^{+i tau t} convention so that
trajectories of u_t + L u = 0 concentrate at sigma = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .grid import Field, Grid, GridError
from .symbols import HypothesisCertificate, SymbolSpec, eval_dispersion

__all__ = [
    "CutoffBank", "SpaceTimeField", "PeriodizationError",
    "dyadic_range",
    "project_space", "project_space_le", "project_space_ge",
    "project_modulation", "project_modulation_le", "project_modulation_ge",
    "decompose_indicator", "extension_rho",
    "pseudo_product", "trilinear_It",
    "classify_triple", "resonance_support_test", "ResonanceTestResult",
]


class PeriodizationError(ValueError):
    """Time window too small for the requested operation."""


def _smooth_eta(x: np.ndarray) -> np.ndarray:
    x = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    out[x <= 1.0] = 1.0
    ramp = (x > 1.0) & (x < 2.0)
    y = x[ramp] - 1.0
    out[ramp] = np.exp(1.0 - 1.0 / (1.0 - y * y))
    return out


def _sharp_eta(x: np.ndarray) -> np.ndarray:
    return (np.abs(np.asarray(x, dtype=float)) <= 1.0).astype(float)


@dataclass(frozen=True)
class CutoffBank:
    """Smooth or sharp dyadic cutoff family."""

    mode: str = "smooth"

    def __post_init__(self):
        if self.mode not in ("smooth", "sharp"):
            raise ValueError(f"unknown cutoff mode {self.mode!r}")

    def eta(self, x) -> np.ndarray:
        return _smooth_eta(x) if self.mode == "smooth" else _sharp_eta(x)

    def phi(self, x) -> np.ndarray:
        return self.eta(x) - self.eta(2.0 * np.asarray(x, dtype=float))

    def phi_band(self, xi, N: float) -> np.ndarray:
        """phi_N(xi); support in {N/2 <= |xi| <= 2N}."""
        return self.phi(np.asarray(xi, dtype=float) / N)

    def le(self, xi, N: float) -> np.ndarray:
        """Multiplier of P_{<=N} (and of Q_{<=L} in sigma): eta(xi/N)."""
        return self.eta(np.asarray(xi, dtype=float) / N)

    def psi0(self, sigma) -> np.ndarray:
        """Lowest modulation band, complementing the L >= 1 dyadic bands."""
        return self.eta(2.0 * np.asarray(sigma, dtype=float))


def dyadic_range(lo: float, hi: float) -> list:
    """Dyadic numbers 2^j covering [lo, hi]."""
    j0 = math.floor(math.log2(lo))
    j1 = math.ceil(math.log2(hi))
    return [2.0 ** j for j in range(j0, j1 + 1)]


# -- space-time fields ------------------------------------------------

@dataclass(frozen=True)
class SpaceTimeField:
    """Uniformly sampled real trajectory on grid x [t0, t0 + m*dt)."""

    grid: Grid
    t0: float
    dt: float
    values: np.ndarray
    warnings: tuple = ()

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if vals.ndim != 2 or vals.shape[1] != self.grid.n:
            raise GridError(f"values must be (m, {self.grid.n}), got {vals.shape}")
        m = vals.shape[0]
        if m < 8 or (m & (m - 1)) != 0:
            raise GridError("number of time samples must be a power of two, >= 8")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def window(self) -> float:
        return self.m * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.m)

    @property
    def taus(self) -> np.ndarray:
        """Temporal frequencies in FFT order (rad / time)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.m, d=self.dt)

    @cached_property
    def spectrum2d(self) -> np.ndarray:
        """v_hat(tau_j, xi_k): e^{-i xi x} in space, e^{+i tau t} in time."""
        return np.fft.ifft(np.fft.fft(self.values, axis=1) / self.grid.n, axis=0)

    def with_spectrum2d(self, spec2: np.ndarray, warnings: tuple = ()) -> "SpaceTimeField":
        vals = np.fft.ifft(np.fft.fft(spec2, axis=0) * self.grid.n, axis=1)
        return SpaceTimeField(grid=self.grid, t0=self.t0, dt=self.dt,
                              values=vals.real, warnings=self.warnings + warnings)

    def sigma(self, spec: SymbolSpec) -> np.ndarray:
        """sigma(tau, xi) = tau - p(xi) on the (m, n) spectral lattice."""
        p = eval_dispersion(spec, self.grid.full_wavenumbers)
        return self.taus[:, None] - p[None, :]

    def row(self, j: int) -> Field:
        return Field.from_values(self.grid, self.values[j], time=float(self.times[j]))

    def l2_norm(self) -> float:
        """Space-time L2 over the window."""
        return float(np.sqrt(self.dt * self.grid.dx * np.sum(self.values ** 2)))

    @classmethod
    def from_snapshots(cls, fields, t0: float, dt: float) -> "SpaceTimeField":
        vals = np.stack([f.values for f in fields])
        return cls(grid=fields[0].grid, t0=t0, dt=dt, values=vals)


# -- spatial projectors -----------------------------------------------

def _mul_space(f, weights_half, weights_full):
    if isinstance(f, Field):
        return Field.from_spectrum(f.grid, f.spectrum * weights_half, time=f.time)
    spec2 = f.spectrum2d * weights_full[None, :]
    return f.with_spectrum2d(spec2)


def project_space(f, N: float, bank: CutoffBank = CutoffBank()) :
    """P_N: restrict to spatial frequencies |xi| ~ N."""
    if isinstance(f, Field):
        return _mul_space(f, bank.phi_band(f.grid.wavenumbers, N), None)
    return _mul_space(f, None, bank.phi_band(f.grid.full_wavenumbers, N))


def project_space_le(f, N: float, bank: CutoffBank = CutoffBank()):
    if isinstance(f, Field):
        return _mul_space(f, bank.le(f.grid.wavenumbers, N), None)
    return _mul_space(f, None, bank.le(f.grid.full_wavenumbers, N))


def project_space_ge(f, N: float, bank: CutoffBank = CutoffBank()):
    """P_{>=N} = 1 - P_{<=N/2}."""
    if isinstance(f, Field):
        return _mul_space(f, 1.0 - bank.le(f.grid.wavenumbers, N / 2.0), None)
    return _mul_space(f, None, 1.0 - bank.le(f.grid.full_wavenumbers, N / 2.0))


# -- modulation projectors --------------------------------------------

def _modulation_warning(f: SpaceTimeField, L: float) -> tuple:
    dtau = 2.0 * np.pi / f.window
    if L > 0 and L < 2.0 * dtau:
        return (f"band L={L} below the tau resolution {dtau:.3g} of the window",)
    return ()


def project_modulation(f: SpaceTimeField, L: float, spec: SymbolSpec,
                       bank: CutoffBank = CutoffBank()) -> SpaceTimeField:
    """Q_L: restrict to |tau - p(xi)| ~ L.  L = 0 selects the psi_0 band."""
    sigma = f.sigma(spec)
    if L == 0:
        w = bank.psi0(sigma)
    else:
        w = bank.phi_band(sigma, L)
    return f.with_spectrum2d(f.spectrum2d * w, warnings=_modulation_warning(f, L))


def project_modulation_le(f: SpaceTimeField, L: float, spec: SymbolSpec,
                          bank: CutoffBank = CutoffBank()) -> SpaceTimeField:
    """Q_{<=L} = psi_0 + sum_{1 <= K <= L} psi_K; multiplier eta(sigma/L)."""
    sigma = f.sigma(spec)
    return f.with_spectrum2d(f.spectrum2d * bank.le(sigma, L),
                             warnings=_modulation_warning(f, L))


def project_modulation_ge(f: SpaceTimeField, L: float, spec: SymbolSpec,
                          bank: CutoffBank = CutoffBank()) -> SpaceTimeField:
    sigma = f.sigma(spec)
    return f.with_spectrum2d(f.spectrum2d * (1.0 - bank.le(sigma, L / 2.0)),
                             warnings=_modulation_warning(f, L))


# -- time-cutoff decomposition and extension --------------------------

def decompose_indicator(T: float, R: float, times: np.ndarray,
                        bank: CutoffBank = CutoffBank()) -> tuple:
    """Split 1_[0,T] into its eta(tau/R) Fourier truncation and the rest."""
    if T <= 0 or R <= 0:
        raise ValueError("T and R must be positive")
    times = np.asarray(times, dtype=float)
    dt = times[1] - times[0]
    span = times[-1] - times[0] + dt
    if span < 4.0 * T or times[0] > -T / 4.0 or times[-1] < 1.25 * T:
        raise PeriodizationError(
            f"window [{times[0]:.3g}, {times[-1]:.3g}] too small for T={T}")
    ind = ((times >= 0.0) & (times <= T)).astype(float)
    tau = 2.0 * np.pi * np.fft.fftfreq(times.size, d=dt)
    low = np.fft.ifft(np.fft.fft(ind) * bank.le(tau, R)).real
    return low, ind - low


def extension_rho(u: SpaceTimeField, bank: CutoffBank = CutoffBank()) -> SpaceTimeField:
    """Extend a trajectory on [0, T] to a window containing [-2, 2] via
    t -> eta(t) u(T mu(t/T)) with mu(t) = max(1 - |t - 1|, 0).

    The output time grid shares the input step, so the tent re-indexing is
    exact (no interpolation)."""
    T = u.window
    if not (0.0 < T < 2.0):
        raise ValueError(f"extension requires 0 < T < 2, got T={T}")
    if abs(u.t0) > 1e-12 * max(T, 1.0):
        raise ValueError("input trajectory must start at t = 0")
    dt = u.dt
    m_out = 8
    while m_out * dt < 4.4:
        m_out *= 2
    k_lo = -(m_out // 2)
    t_out = (k_lo + np.arange(m_out)) * dt
    mu = np.maximum(1.0 - np.abs(t_out / T - 1.0), 0.0)
    s = T * mu
    idx = np.clip(np.rint(s / dt).astype(int), 0, u.m - 1)
    vals = bank.eta(t_out)[:, None] * u.values[idx, :]
    return SpaceTimeField(grid=u.grid, t0=float(t_out[0]), dt=dt, values=vals)


# -- pseudo-products --------------------------------------------------

def _shifted_spectrum(f: Field) -> np.ndarray:
    return np.fft.fftshift(np.fft.fft(f.values) / f.grid.n)


def pseudo_product(f: Field, g: Field,
                   chi: Optional[Callable] = None) -> Field:
    """Frequency-weighted product: spectrum of the result at xi is
    sum over xi1 of f_hat(xi1) g_hat(xi - xi1) chi(xi, xi1).

    The convolution is alias-free (output modes beyond the grid are
    dropped) and the result is dealiased by the 2/3 rule, so chi = 1
    reproduces the dealiased collocation product for band-limited input.
    """
    if f.grid != g.grid:
        raise GridError("pseudo_product requires a common grid")
    grid = f.grid
    n = grid.n
    if chi is None:
        prod = Field.from_values(grid, f.values * g.values, time=f.time)
        from .grid import dealias
        return dealias(prod)
    Fs = _shifted_spectrum(f)
    Gs = _shifted_spectrum(g)
    k = np.arange(n) - n // 2
    xi = 2.0 * np.pi * k / grid.length
    idx = k[:, None] - k[None, :] + n // 2
    valid = (idx >= 0) & (idx < n)
    Gmat = np.where(valid, Gs[np.clip(idx, 0, n - 1)], 0.0)
    chimat = np.asarray(chi(xi[:, None], xi[None, :]), dtype=complex)
    H = (Gmat * chimat) @ Fs
    H[np.abs(k) > n / 3.0] = 0.0
    spec_full = np.fft.ifftshift(H)
    vals = np.fft.ifft(spec_full * n)
    return Field.from_values(grid, vals.real, time=f.time)


def trilinear_It(u1: SpaceTimeField, u2: SpaceTimeField, u3: SpaceTimeField,
                 t: float, chi: Optional[Callable] = None) -> float:
    """Time-quadrature (trapezoid) of int Pi(u1, u2) u3 dx from 0 to t."""
    if not (u1.grid == u2.grid == u3.grid):
        raise GridError("common grid required")
    times = u1.times
    if t < times[0] - 1e-12 or t > times[-1] + u1.dt + 1e-12:
        raise ValueError(f"t={t} outside the time window")
    sel = (times >= -1e-12) & (times <= t + 1e-12)
    if not np.any(sel):
        return 0.0
    idxs = np.nonzero(sel)[0]
    integrand = np.empty(idxs.size)
    dx = u1.grid.dx
    for out_i, j in enumerate(idxs):
        pij = pseudo_product(u1.row(j), u2.row(j), chi)
        integrand[out_i] = dx * float(np.sum(pij.values * u3.values[j]))
    return float(np.trapezoid(integrand, dx=u1.dt))


# -- resonance support test -------------------------------------------

@dataclass(frozen=True)
class ResonanceTestResult:
    classification: str
    max_normalized_integral: float
    witness_found: bool
    trials: int


def classify_triple(N: tuple, L: tuple, alpha: float,
                    certificate: HypothesisCertificate) -> str:
    """Label a dyadic (N, L) triple against max(L) ~ max(N1 N2^alpha, L_med),
    with the measured two-sided constants widened by a factor 4."""
    if certificate is None:
        raise ValueError("resonance classification requires a hypothesis certificate")
    N1, N2, N3 = sorted(N)
    Ls = sorted(L)
    L_med, L_max = Ls[1], Ls[2]
    target = max(N1 * N2 ** alpha, L_med)
    lo = certificate.ratio_min / 4.0 * target
    hi = 4.0 * certificate.ratio_max * target
    return "compatible" if lo <= L_max <= hi else "violating"


def _sample_tau(rng, p: float, L: float) -> Optional[int]:
    """Integer tau with |tau - p| in (L/2, L], either side, or None."""
    for _ in range(8):
        side = 1 if rng.random() < 0.5 else -1
        lo = p + side * L / 2.0 if side > 0 else p - L
        hi = p + L if side > 0 else p - L / 2.0
        a = math.floor(lo) + 1  # integers in (lo, hi]
        b = math.floor(hi)
        if side < 0:
            a = math.ceil(lo)           # integers in [lo, hi)
            b = math.ceil(hi) - 1
        if b >= a:
            return int(rng.integers(a, b + 1))
    return None


def _band_ints(N: float) -> np.ndarray:
    """Integers k with N/2 < |k| <= N."""
    lo = math.floor(N / 2.0) + 1
    hi = math.floor(N)
    pos = np.arange(lo, hi + 1)
    return np.concatenate([pos, -pos])


def _add_mode(modes: dict, k: int, tau: int, coeff: complex):
    modes[(k, tau)] = modes.get((k, tau), 0.0) + coeff
    modes[(-k, -tau)] = modes.get((-k, -tau), 0.0) + np.conj(coeff)


def resonance_support_test(N1: float, N2: float, N3: float,
                           L1: float, L2: float, L3: float,
                           spec: SymbolSpec,
                           trials: int,
                           certificate: HypothesisCertificate,
                           modes_per_field: int = 12,
                           seed: int = 0) -> ResonanceTestResult:
    """Probe int Pi(Q_L1 P_N1 u, Q_L2 P_N2 v) Q_L3 P_N3 w with sharp cutoffs.

    Fields live on the integer (k, tau) lattice (period 2 pi in space and
    time), built as sparse random Hermitian mode sets inside the sharp
    bands; the pairing is evaluated exactly by convolution-support
    arithmetic.  Candidate witness modes -(k1+k2, tau1+tau2) are injected
    into the third field whenever they fall inside its support."""
    if not (N1 <= N2 <= N3):
        raise ValueError("require N1 <= N2 <= N3")
    alpha = spec.dispersion_order
    classification = classify_triple((N1, N2, N3), (L1, L2, L3), alpha, certificate)
    rng = np.random.default_rng(seed)
    band1, band2, band3 = _band_ints(N1), _band_ints(N2), _band_ints(N3)
    band3_set = set(int(k) for k in band3)

    best = 0.0
    witness = False
    for _ in range(trials):
        fields = []
        for band, L in ((band1, L1), (band2, L2), (band3, L3)):
            modes = {}
            for _ in range(modes_per_field):
                k = int(rng.choice(band))
                tau = _sample_tau(rng, eval_dispersion(spec, float(k)), L)
                if tau is None:
                    continue
                c = rng.standard_normal() + 1j * rng.standard_normal()
                _add_mode(modes, k, tau, c)
            fields.append(modes)
        m1, m2, m3 = fields
        # inject compatible witness modes into the third field
        p3 = {}
        for (k1, t1) in m1:
            for (k2, t2) in m2:
                k3, t3 = -(k1 + k2), -(t1 + t2)
                if k3 not in band3_set or (k3, t3) in m3 or (k3, t3) in p3:
                    continue
                s3 = abs(t3 - eval_dispersion(spec, float(k3)))
                if L3 / 2.0 < s3 <= L3:
                    p3[(k3, t3)] = True
        for (k3, t3) in p3:
            c = rng.standard_normal() + 1j * rng.standard_normal()
            _add_mode(m3, k3, t3, c)
        if not (m1 and m2 and m3):
            continue
        total = 0.0 + 0.0j
        for (k1, t1), c1 in m1.items():
            for (k2, t2), c2 in m2.items():
                c3 = m3.get((-(k1 + k2), -(t1 + t2)))
                if c3 is not None:
                    total += c1 * c2 * c3
        norms = 1.0
        for modes in (m1, m2, m3):
            norms *= math.sqrt(sum(abs(c) ** 2 for c in modes.values()))
        if norms == 0.0:
            continue
        val = abs(total) / norms
        best = max(best, val)
        if val > 1e-8:
            witness = True
    return ResonanceTestResult(classification=classification,
                               max_normalized_integral=best,
                               witness_found=witness,
                               trials=trials)
