"""Randomized property suites behind the `validate` subcommand.

Each suite returns a SuiteResult with the worst observed metric, so the
CLI can print a table and the test suite can assert on the same numbers.
Constants that theory leaves unnamed (product / algebra / isomorphism
ratios) are reported, not asserted against a formula; the suite fails
only if a ratio escapes a generous frozen envelope or an exact identity
breaks tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equations import NonlocalKit, _rhs_forq_u_coeffs, _rhs_forq_v_coeffs
from .grid import Grid, SpectralField, apply_multiplier, derivative, lp_norm, \
    one_minus_dx, one_minus_dx_inv
from .littlewood_paley import BesovIndex, DyadicPartition, besov_norm, block, \
    check_product_estimate


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    detail: str


def random_band_limited(
    grid: Grid, rng: np.random.Generator, max_freq: float = 8.0, amplitude: float = 1.0
) -> SpectralField:
    """Random real field with spectrum confined to |xi| <= max_freq."""
    coeffs = np.zeros(grid.size, dtype=complex)
    mask = (np.abs(grid.xi) <= max_freq) & (grid.xi > 0)
    idx = np.nonzero(mask)[0]
    vals = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
    coeffs[idx] = vals
    coeffs[-idx] = np.conj(vals)
    coeffs[0] = rng.normal()
    scale = np.abs(coeffs).sum()
    if scale > 0:
        coeffs *= amplitude / scale
    return SpectralField(grid, coeffs=coeffs)


def suite_partition(part: DyadicPartition, break_phi: bool = False) -> SuiteResult:
    """Partition of unity, plateau and support disjointness on the lattice."""
    grid = part.grid
    abs_xi = np.abs(grid.xi)
    chi = part.chi.copy()
    phis = [p.copy() for p in part.phis]
    if break_phi:
        # negative control: smear block 0 outside its annulus
        phis[0] = phis[0] + 1e-6 * (abs_xi > 8.0 / 3.0)

    worst = 0.0
    failures = []

    resolved = abs_xi <= 0.75 * 2.0 ** (part.j_max + 1)
    pou = np.abs(chi + sum(phis) - 1.0)[resolved].max()
    worst = max(worst, pou)
    if pou > 1e-12:
        failures.append(f"partition of unity off by {pou:.3e}")

    for j, phi in enumerate(phis):
        supp = phi != 0.0
        lo, hi = 0.75 * 2.0**j, (8.0 / 3.0) * 2.0**j
        if np.any(supp & ((abs_xi < lo) | (abs_xi > hi))):
            failures.append(f"phi_{j} support escapes [{lo:g}, {hi:g}]")
        plateau = (abs_xi >= (4.0 / 3.0) * 2.0**j) & (abs_xi <= 1.5 * 2.0**j)
        if plateau.any():
            dev = np.abs(phi[plateau] - 1.0).max()
            worst = max(worst, dev)
            if dev > 1e-12:
                failures.append(f"phi_{j} plateau deviates by {dev:.3e}")

    for j in range(part.j_max + 1):
        for jp in range(j + 2, part.j_max + 1):
            if np.any((phis[j] != 0) & (phis[jp] != 0)):
                failures.append(f"phi_{j} and phi_{jp} supports overlap")
        if j >= 1 and np.any((chi != 0) & (phis[j] != 0)):
            failures.append(f"chi and phi_{j} supports overlap")

    return SuiteResult("partition", not failures, worst,
                       failures[0] if failures else "all lattice identities exact")


def suite_multiplier(grid: Grid, rng: np.random.Generator) -> SuiteResult:
    worst = 0.0
    om, om_inv = one_minus_dx(grid), one_minus_dx_inv(grid)
    f = random_band_limited(grid, rng)
    round_trip = apply_multiplier(om, apply_multiplier(om_inv, f))
    worst = max(worst, float(np.abs(round_trip.coeffs - f.coeffs).max()
                             / np.abs(f.coeffs).max()))
    kit = NonlocalKit(grid)
    fused = kit.dx_helmholtz_inv.symbol
    composed = kit.dx.compose(kit.helmholtz_inv).symbol
    worst = max(worst, float(np.abs(fused - composed).max()))
    d = derivative(grid)
    for k in (1.0, 2.0, grid.nyquist / 4.0):
        units = round(k / grid.lattice_spacing)
        kk = units * grid.lattice_spacing
        sin_k = SpectralField(grid, values=np.sin(kk * grid.x))
        err = np.abs(apply_multiplier(d, sin_k).values - kk * np.cos(kk * grid.x)).max()
        worst = max(worst, float(err / max(kk, 1.0)))
    return SuiteResult("multiplier", worst < 1e-10, worst,
                       "inverse pair, fused symbol, differentiation")


def suite_parseval(grid: Grid, rng: np.random.Generator, trials: int = 5) -> SuiteResult:
    worst = 0.0
    for _ in range(trials):
        f = random_band_limited(grid, rng)
        phys = np.sum(f.values**2) * grid.dx
        spec = 2.0 * grid.half_length * np.sum(np.abs(f.coeffs) ** 2)
        worst = max(worst, abs(phys - spec) / phys)
    return SuiteResult("parseval", worst < 1e-12, worst, f"{trials} random fields")


def suite_bernstein(
    grid: Grid, part: DyadicPartition, rng: np.random.Generator, trials: int = 5
) -> SuiteResult:
    d = derivative(grid)
    worst = 0.0
    for _ in range(trials):
        f = random_band_limited(grid, rng, max_freq=min(48.0, grid.nyquist / 4))
        for j in range(0, min(part.j_max, 6) + 1):
            for p in (2.0, np.inf):
                bj = block(j, f, part)
                base = lp_norm(bj, p)
                if base < 1e-14:
                    continue
                ratio = lp_norm(apply_multiplier(d, bj), p) / (2.0**j * base)
                worst = max(worst, ratio)
    bound = (8.0 / 3.0) * 1.05
    return SuiteResult("bernstein", worst <= bound, worst,
                       f"derivative gain per block <= {bound:.3f}")


def suite_isomorphism(
    grid: Grid, part: DyadicPartition, rng: np.random.Generator,
    idx: BesovIndex = BesovIndex(3.0, 2.0, 2.0), trials: int = 10,
) -> SuiteResult:
    """Ratio ||(1-dx)^{-1} f||_{B^s} / ||f||_{B^{s-1}} stays in a fixed band."""
    om_inv = one_minus_dx_inv(grid)
    lo, hi = np.inf, 0.0
    for _ in range(trials):
        f = random_band_limited(grid, rng, max_freq=min(48.0, grid.nyquist / 4))
        ratio = besov_norm(apply_multiplier(om_inv, f), idx, part) / besov_norm(
            f, idx.shifted(-1.0), part
        )
        lo, hi = min(lo, ratio), max(hi, ratio)
    ok = 0.1 <= lo <= hi <= 10.0
    return SuiteResult("isomorphism", ok, hi, f"ratios in [{lo:.3f}, {hi:.3f}]")


def suite_product(
    grid: Grid, part: DyadicPartition, rng: np.random.Generator,
    idx: BesovIndex = BesovIndex(3.0, 2.0, 2.0), trials: int = 20,
) -> SuiteResult:
    worst = 0.0
    # keep the product band inside the resolved blocks
    band = min(24.0, 0.75 * 2.0**part.j_max)
    for _ in range(trials):
        u = random_band_limited(grid, rng, max_freq=band)
        v = random_band_limited(grid, rng, max_freq=band)
        worst = max(worst, check_product_estimate(u, v, idx, part))
    return SuiteResult("product", worst < 50.0, worst,
                       f"max bilinear ratio over {trials} pairs")


def suite_algebra(
    grid: Grid, part: DyadicPartition, rng: np.random.Generator,
    idx: BesovIndex = BesovIndex(1.0, 2.0, 2.0), trials: int = 20,
) -> SuiteResult:
    """||uv||_{B^s} / (||u|| ||v||) bounded for s above the algebra threshold."""
    if idx.s <= max(1.0 / idx.p, 0.5):
        raise ValueError("algebra suite needs s above max(1/p, 1/2)")
    worst = 0.0
    band = min(24.0, 0.75 * 2.0**part.j_max)
    for _ in range(trials):
        u = random_band_limited(grid, rng, max_freq=band)
        v = random_band_limited(grid, rng, max_freq=band)
        ratio = besov_norm(u * v, idx, part) / (
            besov_norm(u, idx, part) * besov_norm(v, idx, part)
        )
        worst = max(worst, ratio)
    return SuiteResult("algebra", worst < 50.0, worst,
                       f"max algebra ratio over {trials} pairs")


def suite_besov_axioms(
    grid: Grid, part: DyadicPartition, rng: np.random.Generator,
    idx: BesovIndex = BesovIndex(3.0, 2.0, 2.0), trials: int = 10,
) -> SuiteResult:
    worst = 0.0
    for _ in range(trials):
        f = random_band_limited(grid, rng)
        g = random_band_limited(grid, rng)
        lam = float(rng.uniform(0.5, 3.0))
        nf = besov_norm(f, idx, part)
        hom = abs(besov_norm(lam * f, idx, part) - lam * nf) / (lam * nf)
        worst = max(worst, hom)
        tri = besov_norm(f + g, idx, part) - nf - besov_norm(g, idx, part)
        if tri > 1e-12 * nf:
            worst = max(worst, tri / nf)
    return SuiteResult("besov", worst < 1e-12, worst,
                       "homogeneity and triangle inequality")


def suite_oracle(grid: Grid, rng: np.random.Generator, trials: int = 10) -> SuiteResult:
    """Cross-form identity rhs_v((1-dx) u) = (1-dx) rhs_u(u)."""
    kit = NonlocalKit(grid)
    worst = 0.0
    for _ in range(trials):
        u = random_band_limited(grid, rng, max_freq=8.0, amplitude=0.1)
        uc = u.coeffs
        lhs = _rhs_forq_v_coeffs(kit._om * uc, kit)
        rhs = kit._om * _rhs_forq_u_coeffs(uc, kit)
        worst = max(worst, float(np.abs(lhs - rhs).max() / np.abs(rhs).max()))
    return SuiteResult("oracle", worst < 1e-9, worst,
                       "v-form matches transported u-form")


SUITE_GROUPS = {
    "lp": ["partition", "bernstein", "isomorphism", "product", "algebra", "besov"],
    "grid": ["multiplier", "parseval"],
    "equations": ["oracle"],
}


def run_suites(
    grid: Grid,
    seed: int = 0,
    only: str | None = None,
    break_phi: bool = False,
) -> list[SuiteResult]:
    """Run the property suites; `only` selects one suite or a group name."""
    rng = np.random.default_rng(seed)
    part = DyadicPartition(grid)
    runners = {
        "partition": lambda: suite_partition(part, break_phi=break_phi),
        "multiplier": lambda: suite_multiplier(grid, rng),
        "parseval": lambda: suite_parseval(grid, rng),
        "bernstein": lambda: suite_bernstein(grid, part, rng),
        "isomorphism": lambda: suite_isomorphism(grid, part, rng),
        "product": lambda: suite_product(grid, part, rng),
        "algebra": lambda: suite_algebra(grid, part, rng),
        "besov": lambda: suite_besov_axioms(grid, part, rng),
        "oracle": lambda: suite_oracle(grid, rng),
    }
    if only:
        names = SUITE_GROUPS.get(only, [only])
        unknown = [n for n in names if n not in runners]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    else:
        names = list(runners)
    return [runners[name]() for name in names]
