"""Periodic spectral grid, field representation and Fourier multipliers.

The computational domain is [-L, L) with L an integer multiple of 12*pi,
sampled at N equispaced points (N a power of two).  The frequency lattice
is xi_k = k*pi/L, so the lattice spacing 1/(12K) makes every carrier
frequency 17/12 * 2^n an exact lattice point.

Transform convention: the forward transform carries 1/N, i.e.

    f(x_i) = sum_k coeffs[k] * exp(i xi_k x_i)

with x_i = -L + i*dx.  The shift of the origin relative to the raw FFT
sample ordering is absorbed into a per-mode phase (-1)^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: fraction of the Nyquist frequency retained when dealiasing.  The
#: nonlinearities are cubic, so products of retained modes alias only
#: into the discarded upper half of the spectrum.
DEALIAS_FRACTION = 0.5


class GridError(ValueError):
    """Invalid grid construction parameters."""


class Grid:
    """Periodic domain [-L, L) with N equispaced samples.

    Attributes:
        half_length: L, an integer multiple of 12*pi.
        size: N, a power of two.
        dx: sample spacing 2L/N.
        x: sample locations, -L + dx*arange(N).
        xi: angular frequency lattice in FFT ordering, xi_k = k*pi/L.
        nyquist: pi/dx.
        dealias_mask: boolean mask of modes kept by the 1/2 rule.
    """

    def __init__(self, half_length: float, size: int):
        k_ratio = half_length / (12.0 * math.pi)
        if abs(k_ratio - round(k_ratio)) > 1e-9 or round(k_ratio) < 1:
            raise GridError(
                f"half_length must be a positive integer multiple of 12*pi, "
                f"got {half_length!r}"
            )
        if size < 2 or (size & (size - 1)) != 0:
            raise GridError(f"size must be a power of two, got {size!r}")
        self.half_length = float(half_length)
        self.size = int(size)
        self.dx = 2.0 * self.half_length / self.size
        self.x = -self.half_length + self.dx * np.arange(self.size)
        self.xi = 2.0 * np.pi * np.fft.fftfreq(self.size, d=self.dx)
        self.nyquist = np.pi / self.dx
        self.dealias_mask = np.abs(self.xi) <= DEALIAS_FRACTION * self.nyquist
        # basis phase: exp(i xi_k x_0) = exp(-i xi_k L) = (-1)^k
        k = np.rint(self.xi * self.half_length / np.pi).astype(np.int64)
        self._phase = np.where(k % 2 == 0, 1.0, -1.0)
        for arr in (self.x, self.xi, self.dealias_mask, self._phase):
            arr.setflags(write=False)

    @property
    def lattice_spacing(self) -> float:
        return np.pi / self.half_length

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Fourier coefficients of grid samples (1/N normalization)."""
        return np.fft.fft(values) / (self.size * self._phase)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        """Real grid samples from Fourier coefficients."""
        return np.fft.ifft(coeffs * self._phase).real * self.size

    def inverse_complex(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.ifft(coeffs * self._phase) * self.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and other.half_length == self.half_length
            and other.size == self.size
        )

    def __hash__(self) -> int:
        return hash((self.half_length, self.size))

    def __repr__(self) -> str:
        return f"Grid(half_length={self.half_length!r}, size={self.size})"


def make_grid(half_length: float, size: int) -> Grid:
    """Validated Grid constructor; see Grid for the invariants."""
    return Grid(half_length, size)


class SpectralField:
    """Real periodic function held as paired grid samples and coefficients.

    Exactly one side is authoritative at construction; the other is
    computed lazily and cached.  Fields are treated as immutable.
    """

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid: Grid, values=None, coeffs=None):
        if (values is None) == (coeffs is None):
            raise ValueError("exactly one of values/coeffs must be given")
        self.grid = grid
        self._values = None if values is None else np.asarray(values, dtype=float)
        self._coeffs = None if coeffs is None else np.asarray(coeffs, dtype=complex)
        side = self._values if self._values is not None else self._coeffs
        if side.shape != (grid.size,):
            raise ValueError(f"array length {side.shape} does not match grid {grid.size}")

    @classmethod
    def from_values(cls, grid: Grid, values) -> "SpectralField":
        return cls(grid, values=values)

    @classmethod
    def from_coeffs(cls, grid: Grid, coeffs) -> "SpectralField":
        return cls(grid, coeffs=coeffs)

    @classmethod
    def zero(cls, grid: Grid) -> "SpectralField":
        return cls(grid, values=np.zeros(grid.size))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = self.grid.inverse(self._coeffs)
            self._values.setflags(write=False)
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = self.grid.forward(self._values)
            self._coeffs.setflags(write=False)
        return self._coeffs

    def is_finite(self) -> bool:
        side = self._values if self._values is not None else self._coeffs
        return bool(np.all(np.isfinite(side)))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_grid(other)
        return SpectralField(self.grid, coeffs=self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_grid(other)
        return SpectralField(self.grid, coeffs=self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, SpectralField):
            self._check_same_grid(other)
            return SpectralField(self.grid, values=self.values * other.values)
        return SpectralField(self.grid, coeffs=self.coeffs * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return self * (-1.0)

    def _check_same_grid(self, other: "SpectralField") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")


@dataclass(frozen=True)
class Multiplier:
    """Fourier multiplier: per-mode complex symbol on the grid lattice."""

    name: str
    symbol: np.ndarray

    def __post_init__(self):
        self.symbol.setflags(write=False)

    def inverse(self) -> "Multiplier":
        if np.any(self.symbol == 0):
            raise ValueError(f"symbol {self.name!r} vanishes; not invertible")
        return Multiplier(f"{self.name}^-1", 1.0 / self.symbol)

    def compose(self, other: "Multiplier") -> "Multiplier":
        return Multiplier(f"{self.name}*{other.name}", self.symbol * other.symbol)


def multiplier_from_function(name: str, fn, grid: Grid) -> Multiplier:
    return Multiplier(name, np.asarray(fn(grid.xi), dtype=complex))


def derivative(grid: Grid) -> Multiplier:
    return Multiplier("d/dx", 1j * grid.xi)


def one_minus_dx(grid: Grid) -> Multiplier:
    return Multiplier("1-d/dx", 1.0 - 1j * grid.xi)


def one_minus_dx_inv(grid: Grid) -> Multiplier:
    return Multiplier("(1-d/dx)^-1", 1.0 / (1.0 - 1j * grid.xi))


def helmholtz_inverse(grid: Grid) -> Multiplier:
    return Multiplier("(1-d2/dx2)^-1", (1.0 / (1.0 + grid.xi**2)).astype(complex))


def dx_helmholtz_inverse(grid: Grid) -> Multiplier:
    return Multiplier("d/dx (1-d2/dx2)^-1", 1j * grid.xi / (1.0 + grid.xi**2))


def apply_multiplier(m: Multiplier, f: SpectralField) -> SpectralField:
    """Pointwise multiplication of the coefficients by the symbol."""
    if not f.is_finite():
        raise ValueError("non-finite field passed to apply_multiplier")
    if m.symbol.shape != f.coeffs.shape:
        raise ValueError("symbol not defined on the field's lattice")
    return SpectralField(f.grid, coeffs=m.symbol * f.coeffs)


def lp_norm(f: SpectralField, p: float) -> float:
    """Rectangle-rule L^p norm on [-L, L); p = inf gives the sample max."""
    if p != np.inf and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    a = np.abs(f.values)
    if p == np.inf:
        return float(a.max())
    return float((np.sum(a**p) * f.grid.dx) ** (1.0 / p))
