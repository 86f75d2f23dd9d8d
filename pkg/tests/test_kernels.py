import numpy as np

from besovlab.kernels import (
    _nl_forq_u_np,
    _nl_forq_v_np,
    _rk4_combine_np,
    nl_forq_u,
    nl_forq_v,
    rk4_combine,
)


def test_forq_u_kernels_agree():
    rng = np.random.default_rng(0)
    u, ux = rng.normal(size=512), rng.normal(size=512)
    for a, b in zip(nl_forq_u(u, ux), _nl_forq_u_np(u, ux)):
        assert np.abs(a - b).max() < 1e-15


def test_forq_v_kernels_agree():
    rng = np.random.default_rng(1)
    u, v, vx = rng.normal(size=512), rng.normal(size=512), rng.normal(size=512)
    for a, b in zip(nl_forq_v(u, v, vx), _nl_forq_v_np(u, v, vx)):
        assert np.abs(a - b).max() < 1e-15


def test_rk4_combine_kernels_agree():
    rng = np.random.default_rng(2)
    y, k1, k2, k3, k4 = (
        rng.normal(size=512) + 1j * rng.normal(size=512) for _ in range(5)
    )
    a = rk4_combine(y, k1, k2, k3, k4, 1e-3)
    b = _rk4_combine_np(y, k1, k2, k3, k4, 1e-3)
    assert np.abs(a - b).max() < 1e-15
