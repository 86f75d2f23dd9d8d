"""Dyadic frequency decomposition and Besov norms.

The low-frequency cut chi is a smooth step equal to 1 on |xi| <= 3/4 and
0 on |xi| >= 4/3; the annulus function is phi(xi) = chi(xi/2) - chi(xi),
so the partition of unity chi + sum_j phi(2^-j xi) = 1 telescopes exactly
on the lattice.  Dyadic blocks are the corresponding multipliers:
block -1 applies chi(D), block j >= 0 applies phi(2^-j D).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Grid, Multiplier, SpectralField, apply_multiplier, lp_norm


class ResolutionWarning(UserWarning):
    """Field has non-negligible energy above the largest resolved block."""


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity transition: exactly 0 for t <= 0, exactly 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t >= 1.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    lo = np.exp(-1.0 / tm)
    hi = np.exp(-1.0 / (1.0 - tm))
    out[mid] = lo / (lo + hi)
    return out


def _chi_profile(abs_xi: np.ndarray) -> np.ndarray:
    # 1 on |xi| <= 3/4, 0 on |xi| >= 4/3
    return smooth_step((4.0 / 3.0 - abs_xi) / (4.0 / 3.0 - 3.0 / 4.0))


class DyadicPartition:
    """Sampled chi and phi_j multipliers on a grid's frequency lattice."""

    def __init__(self, grid: Grid):
        if grid.size < 32:
            raise ValueError("grid too small to host dyadic block 0 (need N >= 32)")
        self.grid = grid
        xi_max = float(np.max(np.abs(grid.xi)))
        # block j is fully resolved iff its support 2^j * [3/4, 8/3] fits
        self.j_max = int(math.floor(math.log2(xi_max * 3.0 / 8.0)))
        abs_xi = np.abs(grid.xi)
        self.chi = _chi_profile(abs_xi)
        self.phis = [
            _chi_profile(abs_xi / 2.0 ** (j + 1)) - _chi_profile(abs_xi / 2.0**j)
            for j in range(self.j_max + 1)
        ]
        self.chi.setflags(write=False)
        for p in self.phis:
            p.setflags(write=False)

    def multiplier(self, j: int) -> Multiplier:
        if j == -1:
            return Multiplier("chi(D)", self.chi.astype(complex))
        return Multiplier(f"phi(2^-{j} D)", self.phis[j].astype(complex))

    def resolved_fraction(self) -> np.ndarray:
        """chi + sum_j phi_j on the lattice (1 wherever blocks resolve)."""
        return self.chi + sum(self.phis)


def build_partition(grid: Grid) -> DyadicPartition:
    return DyadicPartition(grid)


@dataclass(frozen=True)
class BesovIndex:
    """Index triple (s, p, r) of a Besov norm."""

    s: float
    p: float
    r: float

    def __post_init__(self):
        for q in (self.p, self.r):
            if q != np.inf and q < 1:
                raise ValueError(f"integrability indices must be >= 1 or inf, got {q}")

    @property
    def wellposed_regime(self) -> bool:
        """Whether s exceeds max(2 + 1/p, 5/2), the well-posedness range."""
        return self.s > max(2.0 + 1.0 / self.p, 2.5)

    def shifted(self, ds: float) -> "BesovIndex":
        return BesovIndex(self.s + ds, self.p, self.r)


def block(j: int, f: SpectralField, part: DyadicPartition) -> SpectralField:
    """Dyadic block: chi(D) f for j = -1, phi(2^-j D) f for 0 <= j <= j_max."""
    if j < -1 or j > part.j_max:
        raise ValueError(f"block index {j} outside [-1, {part.j_max}]")
    return apply_multiplier(part.multiplier(j), f)

def low_cut(j: int, f: SpectralField, part: DyadicPartition) -> SpectralField:
    """Low-frequency cut: the sum of all blocks below index j."""
    if j > part.j_max + 1:
        raise ValueError(f"low-cut index {j} exceeds {part.j_max + 1}")
    if j < 0:
        return SpectralField.zero(f.grid)
    symbol = part.chi.copy()
    for jp in range(0, j):
        symbol += part.phis[jp]
    return apply_multiplier(Multiplier(f"S_{j}", symbol.astype(complex)), f)


def _check_resolved(f: SpectralField, part: DyadicPartition) -> None:
    gap = 1.0 - part.resolved_fraction()
    if not np.any(gap > 1e-12):
        return
    energy = np.abs(f.coeffs) ** 2
    total = energy.sum()
    if total > 0 and energy[gap > 1e-12].sum() > 1e-10 * total:
        warnings.warn(
            "field carries energy above the largest resolved dyadic block; "
            "Besov norms will be truncated",
            ResolutionWarning,
            stacklevel=3,
        )


def block_lp_norms(f: SpectralField, p: float, part: DyadicPartition) -> np.ndarray:
    """L^p norms of the blocks j = -1 .. j_max, in that order."""
    return np.array([lp_norm(block(j, f, part), p) for j in range(-1, part.j_max + 1)])


def besov_norm(f: SpectralField, idx: BesovIndex, part: DyadicPartition) -> float:
    """The l^r norm over j of 2^{js} ||block_j f||_{L^p}."""
    _check_resolved(f, part)
    js = np.arange(-1, part.j_max + 1)
    weighted = 2.0 ** (js * idx.s) * block_lp_norms(f, idx.p, part)
    if idx.r == np.inf:
        return float(weighted.max())
    return float((weighted**idx.r).sum() ** (1.0 / idx.r))


def block_energies(f: SpectralField, idx: BesovIndex, part: DyadicPartition) -> np.ndarray:
    """Per-block weighted energies 2^{js} ||block_j f||_{L^p}, j = -1 .. j_max."""
    js = np.arange(-1, part.j_max + 1)
    return 2.0 ** (js * idx.s) * block_lp_norms(f, idx.p, part)


def check_product_estimate(
    u: SpectralField, v: SpectralField, idx: BesovIndex, part: DyadicPartition
) -> float:
    """Ratio ||uv||_{B^s} / (||u||_inf ||v||_{B^s} + ||v||_inf ||u||_{B^s}).

    A bounded ratio over a randomized corpus is the empirical form of the
    bilinear product estimate; the constant itself is not prescribed.
    """
    if idx.s <= 0:
        raise ValueError("product estimate requires s > 0")
    denom = lp_norm(u, np.inf) * besov_norm(v, idx, part) + lp_norm(
        v, np.inf
    ) * besov_norm(u, idx, part)
    if denom == 0.0:
        return 0.0
    return besov_norm(u * v, idx, part) / denom
