"""Periodic grid, real spectral fields and Fourier-multiplier application.

Transform convention:  u_hat(k) = (1/n) sum_j u(x_j) exp(-i xi_k x_j) with
xi_k = 2 pi k / length, so Parseval reads

    integral |u|^2 dx = length * sum_k w_k |u_hat(k)|^2

with w_k = 2 for 0 < k < n/2 (conjugate pairs) and w_k = 1 for k = 0 and
the Nyquist index.  The Nyquist mode is zeroed after every multiplier
application (its sign under i*xi is ambiguous for real transforms).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

__all__ = [
    "Grid", "Field", "GridError", "MultiplierRealityError",
    "apply_multiplier", "dealias", "dealias_mask",
    "save_field", "load_field",
]


class GridError(ValueError):
    pass


class MultiplierRealityError(ValueError):
    """Multiplier broke the reality of the field."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, length) with n collocation points."""

    length: float
    n: int

    def __post_init__(self):
        if self.length <= 0:
            raise GridError("length must be positive")
        if self.n < 8 or not _is_pow2(self.n):
            raise GridError("n must be a power of two, >= 8")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @property
    def wavenumbers(self) -> np.ndarray:
        """Half-spectrum wavenumbers xi_k = 2 pi k / length, k = 0 .. n/2."""
        return 2.0 * np.pi * np.arange(self.n // 2 + 1) / self.length

    @property
    def full_wavenumbers(self) -> np.ndarray:
        """Signed wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=1.0 / self.n) / self.length

    @property
    def nyquist_index(self) -> int:
        return self.n // 2


def transform(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Real-to-half-spectrum transform under the 1/n convention."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n,):
        raise GridError(f"expected {grid.n} samples, got {values.shape}")
    return np.fft.rfft(values) / grid.n


def inverse_transform(grid: Grid, spectrum: np.ndarray) -> np.ndarray:
    spectrum = np.asarray(spectrum, dtype=complex)
    if spectrum.shape != (grid.n // 2 + 1,):
        raise GridError(f"expected {grid.n // 2 + 1} coefficients, got {spectrum.shape}")
    return np.fft.irfft(spectrum * grid.n, n=grid.n)


@dataclass(frozen=True)
class Field:
    """One real snapshot with its half-spectrum, kept consistent."""

    grid: Grid
    values: np.ndarray
    spectrum: np.ndarray = field(default=None)
    time: float = 0.0

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.spectrum is None:
            spec = transform(self.grid, vals)
        else:
            spec = np.ascontiguousarray(np.asarray(self.spectrum, dtype=complex))
        spec.setflags(write=False)
        object.__setattr__(self, "spectrum", spec)

    @classmethod
    def from_values(cls, grid: Grid, values, time: float = 0.0) -> "Field":
        return cls(grid=grid, values=values, time=time)

    @classmethod
    def from_spectrum(cls, grid: Grid, spectrum, time: float = 0.0) -> "Field":
        spectrum = np.asarray(spectrum, dtype=complex)
        values = inverse_transform(grid, spectrum)
        return cls(grid=grid, values=values, spectrum=spectrum, time=time)

    @classmethod
    def zero(cls, grid: Grid, time: float = 0.0) -> "Field":
        return cls(grid=grid, values=np.zeros(grid.n), time=time)

    def mean(self) -> float:
        return float(self.spectrum[0].real)

    def l2_norm(self) -> float:
        """sqrt(integral u^2 dx), via Parseval with conjugate pairs counted."""
        w = np.full(self.grid.n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return float(np.sqrt(self.grid.length * np.sum(w * np.abs(self.spectrum) ** 2)))


def dealias_mask(grid: Grid) -> np.ndarray:
    """2/3-rule mask on the half-spectrum: keep |k| <= n/3 (inclusive)."""
    k = np.arange(grid.n // 2 + 1)
    return (k <= grid.n / 3.0).astype(float)


def dealias(f: Field) -> Field:
    spec = f.spectrum * dealias_mask(f.grid)
    return Field.from_spectrum(f.grid, spec, time=f.time)


def apply_multiplier(f: Field, m: Callable[[np.ndarray], np.ndarray],
                     reality_tol: float = 1e-10) -> Field:
    """Apply a Fourier multiplier m(xi); raise if it breaks reality.

    The multiplier is evaluated on the full signed wavenumber set; the
    output must be real up to ``reality_tol`` relative to the field norm,
    which enforces m(-xi) = conj(m(xi)) on the sampled modes.
    """
    grid = f.grid
    xi = grid.full_wavenumbers
    mv = np.asarray(m(xi), dtype=complex)
    if mv.shape != xi.shape:
        mv = np.broadcast_to(mv, xi.shape).astype(complex)
    full = np.fft.fft(f.values) / grid.n
    out = mv * full
    out[grid.nyquist_index] = 0.0
    vals = np.fft.ifft(out * grid.n)
    scale = max(float(np.max(np.abs(vals))), float(np.max(np.abs(f.values))), 1e-300)
    if float(np.max(np.abs(vals.imag))) > reality_tol * scale:
        raise MultiplierRealityError(
            "multiplier output is not real: m(-xi) != conj(m(xi))")
    return Field.from_values(grid, vals.real, time=f.time)


# -- snapshot files ---------------------------------------------------

_BIN_MAGIC = b"DSPF\x00\x01"


def save_field(f: Field, path) -> None:
    """Text format: header 'n length time', one sample per line.
    Extensions .bin/.dat select the little-endian float64 binary form."""
    path = Path(path)
    if path.suffix in (".bin", ".dat"):
        with open(path, "wb") as fh:
            fh.write(_BIN_MAGIC)
            fh.write(struct.pack("<qdd", f.grid.n, f.grid.length, f.time))
            fh.write(np.asarray(f.values, "<f8").tobytes())
    else:
        with open(path, "w") as fh:
            fh.write(f"{f.grid.n} {f.grid.length!r} {f.time!r}\n")
            for v in f.values:
                fh.write(f"{float(v)!r}\n")


def load_field(path) -> Field:
    path = Path(path)
    if path.suffix in (".bin", ".dat"):
        with open(path, "rb") as fh:
            magic = fh.read(len(_BIN_MAGIC))
            if magic != _BIN_MAGIC:
                raise GridError(f"{path} is not a field snapshot")
            n, length, time = struct.unpack("<qdd", fh.read(24))
            values = np.frombuffer(fh.read(8 * n), dtype="<f8")
        return Field(grid=Grid(length=length, n=int(n)), values=values, time=time)
    with open(path) as fh:
        header = fh.readline().split()
        n, length, time = int(header[0]), float(header[1]), float(header[2])
        values = np.array([float(fh.readline()) for _ in range(n)])
    return Field(grid=Grid(length=length, n=n), values=values, time=time)
