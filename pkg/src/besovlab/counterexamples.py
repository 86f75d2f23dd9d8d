"""Initial-data families exhibiting non-uniform continuous dependence.

The building block is a band-limited bump: its Fourier transform equals 1
on |xi| <= 1/4, vanishes for |xi| >= 1/2 and transitions smoothly in
between.  From it we form

    f_n = 2^{-ns} bump(x) sin(17/12 * 2^n x)      (high-frequency family)
    g_n = 2^{-n/2} bump(x)                        (low-frequency family)

and the data pair v1 = (1-dx)(f_n + g_n), v2 = (1-dx) f_n.  The carrier
17/12 * 2^n sits inside the plateau [4/3, 3/2] * 2^n of dyadic block n, so
f_n and the key product term are exactly localized in a single block for
n >= 5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, SpectralField, lp_norm
from .littlewood_paley import BesovIndex, smooth_step

CARRIER_RATIO = 17.0 / 12.0


@dataclass(frozen=True)
class BumpSpec:
    """Frequency-side profile of the bump: plateau and support radii."""

    inner_radius: float = 0.25
    outer_radius: float = 0.5

    def profile(self, xi: np.ndarray) -> np.ndarray:
        width = self.outer_radius - self.inner_radius
        return smooth_step((self.outer_radius - np.abs(xi)) / width)


def make_phi(grid: Grid, spec: BumpSpec = BumpSpec()) -> SpectralField:
    """Band-limited bump from frequency-side samples of the profile.

    Coefficients follow the continuum inverse-transform normalization
    (profile / 2L), so the grid function approximates the line function
    independently of L and N.
    """
    if grid.lattice_spacing > spec.outer_radius / 4.0:
        raise ValueError(
            "frequency lattice too coarse to resolve the bump "
            f"(spacing {grid.lattice_spacing:.4g}, need <= {spec.outer_radius / 4:.4g})"
        )
    coeffs = spec.profile(grid.xi) / (2.0 * grid.half_length)
    return SpectralField(grid, coeffs=coeffs.astype(complex))


def _check_carrier(n: int, grid: Grid, margin: float) -> float:
    lam = CARRIER_RATIO * 2.0**n
    xi_max = float(np.max(np.abs(grid.xi)))
    if lam + margin > xi_max:
        raise ValueError(
            f"carrier frequency {lam:g} (+{margin:g}) exceeds the lattice maximum {xi_max:g}"
        )
    return lam


def make_fn(
    n: int, idx: BesovIndex, grid: Grid, phi: SpectralField,
    spec: BumpSpec = BumpSpec(),
) -> SpectralField:
    """High-frequency family member 2^{-ns} phi(x) sin(17/12 2^n x).

    Assembled directly on the frequency side as the shifted bump profile
    (profile(xi - lam) - profile(xi + lam)) / 2i, so the coefficients are
    exactly zero outside the band lam +- outer_radius.
    """
    lam = _check_carrier(n, grid, margin=spec.outer_radius + 0.5)
    shifted = (spec.profile(grid.xi - lam) - spec.profile(grid.xi + lam)) / 2.0j
    coeffs = 2.0 ** (-n * idx.s) / (2.0 * grid.half_length) * shifted
    return SpectralField(grid, coeffs=coeffs)


def band_multiply(f: SpectralField, g: SpectralField) -> SpectralField:
    """Product of band-limited fields by direct spectral convolution.

    Unlike the FFT route, coefficients outside the sum of the two bands
    come out exactly zero, so block-localization statements can be tested
    at roundoff level.  Requires the product band to fit on the lattice.
    """
    grid = f.grid
    if g.grid != grid:
        raise ValueError("fields live on different grids")
    n = grid.size
    a = np.fft.fftshift(f.coeffs)
    b = np.fft.fftshift(g.coeffs)
    ia = np.nonzero(a)[0]
    ib = np.nonzero(b)[0]
    out = np.zeros(n, dtype=complex)
    if ia.size and ib.size:
        seg = np.convolve(a[ia[0]: ia[-1] + 1], b[ib[0]: ib[-1] + 1])
        start = ia[0] + ib[0] - n // 2
        if start < 0 or start + seg.size > n:
            raise ValueError("product band does not fit on the frequency lattice")
        out[start: start + seg.size] = seg
    return SpectralField(grid, coeffs=np.fft.ifftshift(out))


def make_gn(n: int, grid: Grid, phi: SpectralField) -> SpectralField:
    """Low-frequency family member 2^{-n/2} phi(x)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 ** (-n / 2.0) * phi


@dataclass(frozen=True)
class CounterexamplePair:
    n: int
    idx: BesovIndex
    fn: SpectralField
    gn: SpectralField
    v1_0: SpectralField
    v2_0: SpectralField
    u1_0: SpectralField
    u2_0: SpectralField


def make_pair(
    n: int, idx: BesovIndex, grid: Grid, phi: SpectralField
) -> CounterexamplePair:
    """Data pair u1 = f_n + g_n, u2 = f_n with v_i = (1 - dx) u_i."""
    from .equations import NonlocalKit, v_from_u

    kit = NonlocalKit(grid)
    fn = make_fn(n, idx, grid, phi)
    gn = make_gn(n, grid, phi)
    u1 = fn + gn
    u2 = fn
    return CounterexamplePair(
        n=n, idx=idx, fn=fn, gn=gn,
        v1_0=v_from_u(u1, kit), v2_0=v_from_u(u2, kit), u1_0=u1, u2_0=u2,
    )


@dataclass(frozen=True)
class KeyTerm:
    """Single-block product term driving the evolved-distance lower bound."""

    n: int
    term: SpectralField                 # (1-dx)g_n (1+dx)g_n dxx f_n
    psi: SpectralField                  # (1-dx)phi (1+dx)phi dx phi
    leading_factor: SpectralField       # (1-dx)phi (1+dx)phi phi
    identity_residual: float


def key_term(n: int, idx: BesovIndex, grid: Grid, phi: SpectralField) -> KeyTerm:
    """Build the key product term and its bump-only factors.

    Also evaluates the factorization identity
        [2 u1 (v1 - v2) - (v1^2 - v2^2)] dxx f_n
            = (1-dx)g_n (1+dx)g_n dxx f_n + 2 (1-dx)g_n dx f_n dxx f_n
    and returns the relative sup-norm residual of the two sides.
    """
    if n < 5:
        raise ValueError("single-block localization requires n >= 5")
    _check_carrier(n, grid, margin=2.0)  # cubic product widens the support
    from .equations import NonlocalKit

    kit = NonlocalKit(grid)
    pair = make_pair(n, idx, grid, phi)
    dx = kit.dx.symbol

    def d(f: SpectralField) -> SpectralField:
        return SpectralField(grid, coeffs=dx * f.coeffs)

    fn, gn = pair.fn, pair.gn
    d2fn = d(d(fn))
    gm = gn - d(gn)   # (1-dx) g_n
    gp = gn + d(gn)   # (1+dx) g_n
    term = band_multiply(band_multiply(gm, gp), d2fn)

    dphi = d(phi)
    psi = band_multiply(band_multiply(phi - dphi, phi + dphi), dphi)
    leading = band_multiply(band_multiply(phi - dphi, phi + dphi), phi)

    lhs = (
        2.0 * pair.u1_0 * (pair.v1_0 - pair.v2_0)
        - (pair.v1_0 * pair.v1_0 - pair.v2_0 * pair.v2_0)
    ) * d2fn
    rhs = term + 2.0 * gm * d(fn) * d2fn
    scale = lp_norm(lhs, np.inf)
    residual = lp_norm(lhs - rhs, np.inf) / scale if scale > 0 else 0.0
    return KeyTerm(n=n, term=term, psi=psi, leading_factor=leading,
                   identity_residual=float(residual))


def sin_average_factor(p: float, samples: int = 200001) -> float:
    """(mean of |sin|^p over one period)^(1/p), by high-order quadrature."""
    if p == 2:
        return float(np.sqrt(0.5))
    th = np.linspace(0.0, 2.0 * np.pi, samples)
    avg = np.trapezoid(np.abs(np.sin(th)) ** p, th) / (2.0 * np.pi)
    return float(avg ** (1.0 / p))


@dataclass(frozen=True)
class RiemannReport:
    p: float
    lambdas: list[float]
    values: list[float]
    target: float
    average_factor: float

    @property
    def relative_errors(self) -> list[float]:
        return [abs(v - self.target) / self.target for v in self.values]


def riemann_limit(p: float, lambdas: list[float], psi: SpectralField) -> RiemannReport:
    """Oscillatory averaging: ||psi sin(lambda x)||_p for increasing lambda.

    The limit is (mean |sin|^p)^{1/p} ||psi||_p; each lambda must be a
    lattice frequency so the product stays band-limited.
    """
    if p == np.inf or p < 1:
        raise ValueError("p must lie in [1, inf)")
    grid = psi.grid
    xi_max = float(np.max(np.abs(grid.xi)))
    amp = np.abs(psi.coeffs)
    band = float(np.max(np.abs(grid.xi[amp > 1e-13 * amp.max()])))
    values = []
    for lam in lambdas:
        units = lam / grid.lattice_spacing
        if abs(units - round(units)) > 1e-9:
            raise ValueError(f"lambda {lam} is not on the frequency lattice")
        if lam + band > xi_max:
            raise ValueError(
                f"lambda {lam:g} plus the band of psi exceeds the lattice maximum"
            )
        f = SpectralField(grid, values=psi.values * np.sin(lam * grid.x))
        values.append(lp_norm(f, p))
    factor = sin_average_factor(p)
    return RiemannReport(
        p=p, lambdas=[float(l) for l in lambdas], values=values,
        target=factor * lp_norm(psi, p), average_factor=factor,
    )
