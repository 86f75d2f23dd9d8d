import math

import numpy as np
import pytest

from besovlab.grid import (
    Grid,
    GridError,
    SpectralField,
    apply_multiplier,
    derivative,
    dx_helmholtz_inverse,
    helmholtz_inverse,
    lp_norm,
    make_grid,
    one_minus_dx,
    one_minus_dx_inv,
)

L = 12 * math.pi


@pytest.fixture(scope="module")
def grid():
    return make_grid(L, 1024)


def test_grid_rejects_bad_half_length():
    with pytest.raises(GridError):
        make_grid(10.0, 1024)
    with pytest.raises(GridError):
        make_grid(-L, 1024)


def test_grid_rejects_non_power_of_two():
    with pytest.raises(GridError):
        make_grid(L, 1000)


def test_lattice_spacing_hosts_carrier(grid):
    # 17/12 * 2^n must be an exact lattice point
    lam = 17.0 / 12.0 * 2.0**5
    units = lam / grid.lattice_spacing
    assert abs(units - round(units)) < 1e-12


def test_transform_round_trip(grid):
    rng = np.random.default_rng(1)
    vals = rng.normal(size=grid.size)
    back = grid.inverse(grid.forward(vals))
    assert np.abs(back - vals).max() < 1e-12


def test_transform_convention_single_mode(grid):
    # coeffs[k] multiplies exp(i xi_k x) with x measured from -L
    k = 7
    xi = grid.xi[k]
    f = SpectralField(grid, values=np.cos(xi * grid.x))
    c = f.coeffs
    assert abs(c[k] - 0.5) < 1e-12
    assert abs(c[-k] - 0.5) < 1e-12
    others = np.abs(c)
    assert others.sum() - others[k] - others[-k] < 1e-12


def test_parseval(grid):
    rng = np.random.default_rng(2)
    f = SpectralField(grid, values=rng.normal(size=grid.size))
    phys = np.sum(f.values**2) * grid.dx
    spec = 2 * grid.half_length * np.sum(np.abs(f.coeffs) ** 2)
    assert abs(phys - spec) / phys < 1e-12


def test_derivative_on_sine(grid):
    k = 3.0 * grid.lattice_spacing * round(3.0 / grid.lattice_spacing)
    f = SpectralField(grid, values=np.sin(k * grid.x))
    df = apply_multiplier(derivative(grid), f)
    assert np.abs(df.values - k * np.cos(k * grid.x)).max() < 1e-10


def test_one_minus_dx_inverse_pair(grid):
    rng = np.random.default_rng(3)
    f = SpectralField(grid, values=rng.normal(size=grid.size))
    g = apply_multiplier(one_minus_dx(grid), apply_multiplier(one_minus_dx_inv(grid), f))
    assert np.abs(g.coeffs - f.coeffs).max() < 1e-12 * np.abs(f.coeffs).max()


def test_helmholtz_inverse_symbol(grid):
    h = helmholtz_inverse(grid)
    assert np.allclose(h.symbol, 1.0 / (1.0 + grid.xi**2))
    dh = dx_helmholtz_inverse(grid)
    fused = derivative(grid).compose(h)
    assert np.abs(dh.symbol - fused.symbol).max() < 1e-15


def test_multiplier_inverse_rejects_zero(grid):
    with pytest.raises(ValueError):
        derivative(grid).inverse()


def test_field_requires_exactly_one_side(grid):
    z = np.zeros(grid.size)
    with pytest.raises(ValueError):
        SpectralField(grid, values=z, coeffs=z.astype(complex))
    with pytest.raises(ValueError):
        SpectralField(grid)


def test_field_arithmetic(grid):
    f = SpectralField(grid, values=np.cos(grid.x * grid.lattice_spacing))
    g = SpectralField(grid, values=np.sin(grid.x * grid.lattice_spacing))
    assert np.allclose((f + g).values, f.values + g.values)
    assert np.allclose((f - g).values, f.values - g.values)
    assert np.allclose((f * g).values, f.values * g.values)
    assert np.allclose((2.5 * f).values, 2.5 * f.values)
    assert np.allclose((-f).values, -f.values)


def test_field_grid_mismatch(grid):
    other = make_grid(L, 512)
    f = SpectralField.zero(grid)
    g = SpectralField.zero(other)
    with pytest.raises(ValueError):
        f + g


def test_lp_norm_constant(grid):
    one = SpectralField(grid, values=np.ones(grid.size))
    assert abs(lp_norm(one, 2) - math.sqrt(2 * L)) < 1e-12
    assert abs(lp_norm(one, np.inf) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        lp_norm(one, 0.5)


def test_apply_multiplier_rejects_nonfinite(grid):
    vals = np.zeros(grid.size)
    vals[0] = np.nan
    f = SpectralField(grid, values=vals)
    with pytest.raises(ValueError):
        apply_multiplier(derivative(grid), f)
