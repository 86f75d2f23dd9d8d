"""Pointwise kernels for the evolution hot path.

The right-hand-side evaluation alternates FFTs with elementwise cubic
assembly on large arrays.  The assembly kernels here are compiled with
numba when available; setting the environment variable
``BESOVLAB_NO_NUMBA=1`` (or running without numba installed) selects the
pure-numpy fallbacks.  ``benchmarks/bench_kernels.py`` compares the two
paths.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("BESOVLAB_NO_NUMBA", "") not in ("1", "true")


def _nl_forq_u_np(u, ux):
    """Grid-space cubic terms of the u-form right-hand side.

    Returns (local, a, b) with
        local = -u^2 u_x + (1/3) u_x^3      advective + local cubic part
        a     = u_x^3                        argument of (1-dx^2)^{-1}
        b     = (2/3) u^3 + u u_x^2          argument of dx (1-dx^2)^{-1}
    """
    local = -u * u * ux + (1.0 / 3.0) * ux * ux * ux
    a = ux * ux * ux
    b = (2.0 / 3.0) * u * u * u + u * ux * ux
    return local, a, b


def _nl_forq_v_np(u, v, vx):
    """Grid-space cubic terms of the v-form right-hand side.

    Returns (local, a, b) with
        local = (v^2 - 2uv) v_x + (2/3) v^3 - u v^2 - (1/3) u^3
        a     = (8/3) u^3 - (1/3) v^3 - 3 u^2 v
        b     = (1/3) v^3 - u^2 v

    The local part is the convective term plus the cubic zero-order terms
    obtained by substituting u - u_x for v in the u-form; see
    equations.rhs_forq_v for the consistency check that pins it down.
    """
    local = (v * v - 2.0 * u * v) * vx + (2.0 / 3.0) * v * v * v - u * v * v \
        - (1.0 / 3.0) * u * u * u
    a = (8.0 / 3.0) * u * u * u - (1.0 / 3.0) * v * v * v - 3.0 * u * u * v
    b = (1.0 / 3.0) * v * v * v - u * u * v
    return local, a, b


def _rk4_combine_np(y, k1, k2, k3, k4, dt):
    """Classical RK4 state update y + dt/6 (k1 + 2k2 + 2k3 + k4)."""
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


if USE_NUMBA:

    @numba.njit(cache=True)
    def _nl_forq_u_nb(u, ux):  # pragma: no cover - exercised via dispatch
        n = u.shape[0]
        local = np.empty(n)
        a = np.empty(n)
        b = np.empty(n)
        for i in range(n):
            ui = u[i]
            xi = ux[i]
            local[i] = -ui * ui * xi + (1.0 / 3.0) * xi * xi * xi
            a[i] = xi * xi * xi
            b[i] = (2.0 / 3.0) * ui * ui * ui + ui * xi * xi
        return local, a, b

    @numba.njit(cache=True)
    def _nl_forq_v_nb(u, v, vx):  # pragma: no cover
        n = u.shape[0]
        local = np.empty(n)
        a = np.empty(n)
        b = np.empty(n)
        for i in range(n):
            ui = u[i]
            vi = v[i]
            xi = vx[i]
            local[i] = (vi * vi - 2.0 * ui * vi) * xi + (2.0 / 3.0) * vi * vi * vi \
                - ui * vi * vi - (1.0 / 3.0) * ui * ui * ui
            a[i] = (8.0 / 3.0) * ui * ui * ui - (1.0 / 3.0) * vi * vi * vi \
                - 3.0 * ui * ui * vi
            b[i] = (1.0 / 3.0) * vi * vi * vi - ui * ui * vi
        return local, a, b

    @numba.njit(cache=True)
    def _rk4_combine_nb(y, k1, k2, k3, k4, dt):  # pragma: no cover
        n = y.shape[0]
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        return out

    nl_forq_u = _nl_forq_u_nb
    nl_forq_v = _nl_forq_v_nb
    rk4_combine = _rk4_combine_nb
else:
    nl_forq_u = _nl_forq_u_np
    nl_forq_v = _nl_forq_v_np
    rk4_combine = _rk4_combine_np
