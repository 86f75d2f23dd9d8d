import math

import numpy as np
import pytest

from besovlab.counterexamples import (
    CARRIER_RATIO,
    BumpSpec,
    key_term,
    make_fn,
    make_gn,
    make_pair,
    make_phi,
    riemann_limit,
    sin_average_factor,
)
from besovlab.grid import lp_norm, make_grid
from besovlab.littlewood_paley import (
    BesovIndex,
    besov_norm,
    block_lp_norms,
    build_partition,
)

L = 24 * math.pi
IDX = BesovIndex(3.0, 2.0, 2.0)


@pytest.fixture(scope="module")
def grid():
    return make_grid(L, 2**17)


@pytest.fixture(scope="module")
def part(grid):
    return build_partition(grid)


@pytest.fixture(scope="module")
def phi(grid):
    return make_phi(grid)


def test_phi_spectrum_plateau_and_support(grid, phi):
    c = np.abs(phi.coeffs) * 2.0 * L
    inner = np.abs(grid.xi) <= 0.25
    outer = np.abs(grid.xi) >= 0.5
    assert np.abs(c[inner] - 1.0).max() < 1e-12
    assert c[outer].max() == 0.0


def test_phi_normalization_is_grid_independent(phi):
    # continuum normalization: peak value does not depend on L or N
    other = make_phi(make_grid(12 * math.pi, 2**12))
    assert abs(lp_norm(phi, np.inf) - lp_norm(other, np.inf)) < 1e-10


def test_phi_requires_fine_lattice():
    with pytest.raises(ValueError):
        make_phi(make_grid(12 * math.pi, 64), BumpSpec(0.025, 0.05))


def test_fn_localized_in_block_n(grid, part, phi):
    for n in (5, 8):
        fn = make_fn(n, IDX, grid, phi)
        norms = block_lp_norms(fn, 2.0, part)
        dominant = norms[n + 1]
        rest = np.delete(norms, n + 1).sum()
        assert rest < 1e-10 * dominant


def test_fn_besov_norm_bounded_in_n(grid, part, phi):
    # 2^{-ns} cancels the block weight: ||f_n||_{B^s} is n-independent
    norms = [besov_norm(make_fn(n, IDX, grid, phi), IDX, part) for n in (5, 7, 9)]
    assert max(norms) / min(norms) < 1.0 + 1e-10


def test_gn_scaling(grid, phi):
    g5 = make_gn(5, grid, phi)
    g7 = make_gn(7, grid, phi)
    assert abs(lp_norm(g5, 2) / lp_norm(g7, 2) - 2.0) < 1e-12
    with pytest.raises(ValueError):
        make_gn(0, grid, phi)


def test_carrier_must_fit(phi):
    small = make_grid(12 * math.pi, 256)
    with pytest.raises(ValueError):
        make_fn(12, IDX, small, make_phi(small))


def test_pair_initial_distance_slope(grid, part, phi):
    """||v1 - v2||_{B^{s-1}} = ||(1-dx) g_n||_{B^{s-1}} ~ 2^{-n/2}."""
    idx_v = IDX.shifted(-1.0)
    ns = np.arange(5, 11)
    dists = []
    for n in ns:
        pair = make_pair(n, IDX, grid, phi)
        dists.append(besov_norm(pair.v1_0 - pair.v2_0, idx_v, part))
    slope = np.polyfit(ns, np.log2(dists), 1)[0]
    assert abs(slope + 0.5) < 0.05


def test_pair_u_distance_slope(grid, part, phi):
    ns = np.arange(5, 11)
    dists = []
    for n in ns:
        pair = make_pair(n, IDX, grid, phi)
        dists.append(besov_norm(pair.u1_0 - pair.u2_0, IDX, part))
    slope = np.polyfit(ns, np.log2(dists), 1)[0]
    assert abs(slope + 0.5) < 0.05


def test_key_term_single_block(grid, part, phi):
    for n in (5, 8, 10):
        kt = key_term(n, IDX, grid, phi)
        norms = block_lp_norms(kt.term, 2.0, part)
        leak = np.delete(norms, n + 1).sum() / norms[n + 1]
        assert leak < 1e-10


def test_key_term_identity_residual(grid, phi):
    for n in (5, 9):
        assert key_term(n, IDX, grid, phi).identity_residual < 1e-10


def test_key_term_block_norm_scaling(grid, part, phi):
    """2^{n(s-1)} ||T_n||_2 converges to a positive constant."""
    vals = []
    for n in (7, 8, 9, 10):
        kt = key_term(n, IDX, grid, phi)
        vals.append(2.0 ** (n * (IDX.s - 1.0)) * lp_norm(kt.term, 2))
    vals = np.asarray(vals)
    assert vals.min() > 0
    assert np.abs(vals / vals[-1] - 1.0).max() < 0.02


def test_key_term_rejects_small_n(grid, phi):
    with pytest.raises(ValueError):
        key_term(4, IDX, grid, phi)


def test_sin_average_factor():
    assert abs(sin_average_factor(2) - math.sqrt(0.5)) < 1e-15
    assert abs(sin_average_factor(1) - 2.0 / math.pi) < 1e-8
    # p = 4: mean of sin^4 is 3/8
    assert abs(sin_average_factor(4) - (3.0 / 8.0) ** 0.25) < 1e-8


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_riemann_limit(grid, phi, p):
    psi = key_term(5, IDX, grid, phi).psi
    lambdas = [CARRIER_RATIO * 2.0**n for n in range(5, 11)]
    report = riemann_limit(p, lambdas, psi)
    assert report.relative_errors[-1] < 0.01


def test_riemann_limit_rejects_off_lattice(grid, phi):
    psi = key_term(5, IDX, grid, phi).psi
    with pytest.raises(ValueError):
        riemann_limit(2.0, [math.sqrt(2.0)], psi)
    with pytest.raises(ValueError):
        riemann_limit(np.inf, [CARRIER_RATIO * 32], psi)
