import math

import numpy as np
import pytest

from besovlab.grid import SpectralField, make_grid
from besovlab.littlewood_paley import (
    BesovIndex,
    DyadicPartition,
    ResolutionWarning,
    besov_norm,
    block,
    block_lp_norms,
    build_partition,
    low_cut,
    smooth_step,
)

L = 12 * math.pi


@pytest.fixture(scope="module")
def grid():
    return make_grid(L, 4096)


@pytest.fixture(scope="module")
def part(grid):
    return build_partition(grid)


def test_smooth_step_endpoints():
    t = np.array([-1.0, 0.0, 0.2, 0.5, 0.8, 1.0, 2.0])
    s = smooth_step(t)
    assert s[0] == 0.0 and s[1] == 0.0
    assert s[5] == 1.0 and s[6] == 1.0
    assert 0.0 < s[2] < s[3] < s[4] < 1.0
    assert abs(s[3] - 0.5) < 1e-15


def test_partition_of_unity_exact(part):
    abs_xi = np.abs(part.grid.xi)
    resolved = abs_xi <= 0.75 * 2.0 ** (part.j_max + 1)
    total = part.resolved_fraction()
    assert np.abs(total[resolved] - 1.0).max() < 1e-12


def test_support_annuli(part):
    abs_xi = np.abs(part.grid.xi)
    assert not np.any((part.chi != 0) & (abs_xi > 4.0 / 3.0))
    for j, phi in enumerate(part.phis):
        supp = phi != 0
        assert not np.any(supp & (abs_xi < 0.75 * 2.0**j))
        assert not np.any(supp & (abs_xi > (8.0 / 3.0) * 2.0**j))


def test_plateau_is_one(part):
    abs_xi = np.abs(part.grid.xi)
    for j, phi in enumerate(part.phis):
        plateau = (abs_xi >= (4.0 / 3.0) * 2.0**j) & (abs_xi <= 1.5 * 2.0**j)
        if plateau.any():
            assert np.abs(phi[plateau] - 1.0).max() < 1e-12


def test_j_max_formula(grid, part):
    xi_max = float(np.abs(grid.xi).max())
    assert part.j_max == int(math.floor(math.log2(xi_max * 3.0 / 8.0)))
    # block j_max is fully resolved, block j_max + 1 would not be
    assert (8.0 / 3.0) * 2.0**part.j_max <= xi_max
    assert (8.0 / 3.0) * 2.0 ** (part.j_max + 1) > xi_max


def test_partition_needs_minimum_size():
    with pytest.raises(ValueError):
        build_partition(make_grid(L, 16))


def test_besov_index_validation():
    with pytest.raises(ValueError):
        BesovIndex(3.0, 0.5, 2.0)
    idx = BesovIndex(3.0, 2.0, 2.0)
    assert idx.wellposed_regime
    assert not BesovIndex(2.0, 2.0, 2.0).wellposed_regime
    assert idx.shifted(-1.0) == BesovIndex(2.0, 2.0, 2.0)


def test_block_of_pure_mode(grid, part):
    # a mode on the plateau of block j lands entirely in block j
    j = 3
    lam = 17.0 / 12.0 * 2.0**j
    units = round(lam / grid.lattice_spacing)
    lam = units * grid.lattice_spacing
    f = SpectralField(grid, values=np.sin(lam * grid.x))
    norms = block_lp_norms(f, 2.0, part)
    assert norms[j + 1] > 0.99 * math.sqrt(L)  # ||sin||_2 on [-L, L)
    others = np.delete(norms, j + 1)
    assert others.max() < 1e-12


def test_block_index_range(grid, part):
    f = SpectralField.zero(grid)
    with pytest.raises(ValueError):
        block(part.j_max + 1, f, part)
    with pytest.raises(ValueError):
        block(-2, f, part)


def test_blocks_sum_to_field(grid, part):
    rng = np.random.default_rng(0)
    coeffs = np.zeros(grid.size, dtype=complex)
    keep = np.abs(grid.xi) <= 0.75 * 2.0 ** (part.j_max + 1)
    coeffs[keep] = rng.normal(size=keep.sum())
    coeffs = 0.5 * (coeffs + np.conj(coeffs[np.r_[0, grid.size - 1:0:-1]]))
    f = SpectralField(grid, coeffs=coeffs)
    total = block(-1, f, part)
    for j in range(part.j_max + 1):
        total = total + block(j, f, part)
    assert np.abs(total.coeffs - f.coeffs).max() < 1e-12 * max(
        1e-30, np.abs(f.coeffs).max()
    )


def test_low_cut_matches_block_sum(grid, part):
    rng = np.random.default_rng(1)
    f = SpectralField(grid, values=rng.normal(size=grid.size))
    s3 = low_cut(3, f, part)
    manual = block(-1, f, part)
    for j in range(3):
        manual = manual + block(j, f, part)
    assert np.abs(s3.coeffs - manual.coeffs).max() < 1e-14


def test_besov_norm_single_block_scaling(grid, part):
    # a plateau mode in block j has besov norm ~ 2^{js} ||mode||_p
    idx = BesovIndex(3.0, 2.0, 2.0)
    lam4 = round(17.0 / 12.0 * 16 / grid.lattice_spacing) * grid.lattice_spacing
    lam5 = round(17.0 / 12.0 * 32 / grid.lattice_spacing) * grid.lattice_spacing
    f4 = SpectralField(grid, values=np.sin(lam4 * grid.x))
    f5 = SpectralField(grid, values=np.sin(lam5 * grid.x))
    ratio = besov_norm(f5, idx, part) / besov_norm(f4, idx, part)
    assert abs(ratio - 2.0**idx.s) < 1e-10


def test_besov_norm_linf_summability(grid, part):
    idx = BesovIndex(1.0, 2.0, np.inf)
    lam = round(17.0 / 12.0 * 8 / grid.lattice_spacing) * grid.lattice_spacing
    f = SpectralField(grid, values=np.sin(lam * grid.x))
    norms = block_lp_norms(f, 2.0, part)
    js = np.arange(-1, part.j_max + 1)
    assert abs(besov_norm(f, idx, part) - (2.0**js * norms).max()) < 1e-12


def test_resolution_warning(grid, part):
    # energy at the top of the lattice is above every resolved block
    coeffs = np.zeros(grid.size, dtype=complex)
    coeffs[grid.size // 2] = 1.0
    f = SpectralField(grid, coeffs=coeffs)
    with pytest.warns(ResolutionWarning):
        besov_norm(f, BesovIndex(1.0, 2.0, 2.0), part)
