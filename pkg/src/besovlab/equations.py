"""Right-hand sides and time integration for the cubic nonlocal systems.

Two equivalent formulations are implemented:

* the u-form
      u_t = -u^2 u_x + (1/3) u_x^3 - (1/3) H[u_x^3]
            - dx H[(2/3) u^3 + u u_x^2],
  with H = (1-dx^2)^{-1}, plus the companion variant that drops the
  local (1/3) u_x^3 term;

* the v-form for v = (1-dx) u, driven by a convective term
  (v^2 - 2uv) v_x, local cubic terms and two smoothing nonlocal terms.

The v-form local terms are pinned by the exact identity
    rhs_v((1-dx) u) = (1-dx) rhs_u(u),
which holds mode-for-mode on band-limited data because dealiased grid
products are exact spectral truncations.  The test suite enforces it on a
randomized corpus.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import Grid, Multiplier, SpectralField, dx_helmholtz_inverse, \
    derivative, helmholtz_inverse, one_minus_dx, one_minus_dx_inv


class BlowUpError(RuntimeError):
    """Solution exceeded the configured ceiling or became non-finite."""

    def __init__(self, time: float, message: str = ""):
        super().__init__(message or f"blow-up detected at t = {time:.6g}")
        self.time = time


class EquationVariant(enum.Enum):
    FORQ_U = "forq_u"
    FORQ_V = "forq_v"
    NOVIKOV_U = "novikov_u"
    NOVIKOV_V = "novikov_v"

    @property
    def is_v_form(self) -> bool:
        return self in (EquationVariant.FORQ_V, EquationVariant.NOVIKOV_V)


class NonlocalKit:
    """Precomputed multiplier symbols shared by all right-hand sides."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.helmholtz_inv = helmholtz_inverse(grid)
        self.dx_helmholtz_inv = dx_helmholtz_inverse(grid)
        self.one_minus_dx = one_minus_dx(grid)
        self.one_minus_dx_inv = one_minus_dx_inv(grid)
        self.dx = derivative(grid)
        # raw symbol arrays for the coefficient-level hot path
        self._lam = self.helmholtz_inv.symbol
        self._dxlam = self.dx_helmholtz_inv.symbol
        self._om = self.one_minus_dx.symbol
        self._om_inv = self.one_minus_dx_inv.symbol
        self._ixi = self.dx.symbol


@dataclass
class EvolutionConfig:
    grid: Grid
    dt: float
    t_end: float
    variant: EquationVariant = EquationVariant.FORQ_V
    dealias: bool = True
    blowup_ceiling: float = 1e6

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")


def _dealias(coeffs: np.ndarray, grid: Grid, enabled: bool) -> np.ndarray:
    if not enabled:
        return coeffs
    return np.where(grid.dealias_mask, coeffs, 0.0)


def _rhs_forq_u_coeffs(uc: np.ndarray, kit: NonlocalKit, dealias: bool = True,
                       drop_local_cubic: bool = False) -> np.ndarray:
    grid = kit.grid
    u = grid.inverse(uc)
    ux = grid.inverse(kit._ixi * uc)
    local, a, b = kernels.nl_forq_u(u, ux)
    if drop_local_cubic:
        local = local - (1.0 / 3.0) * a
    out = grid.forward(local) - (1.0 / 3.0) * kit._lam * grid.forward(a) \
        - kit._dxlam * grid.forward(b)
    return _dealias(out, grid, dealias)


def _rhs_forq_v_coeffs(vc: np.ndarray, kit: NonlocalKit, dealias: bool = True) -> np.ndarray:
    grid = kit.grid
    uc = kit._om_inv * vc
    u = grid.inverse(uc)
    v = grid.inverse(vc)
    vx = grid.inverse(kit._ixi * vc)
    local, a, b = kernels.nl_forq_v(u, v, vx)
    out = grid.forward(local) - kit._lam * grid.forward(a) \
        - kit._dxlam * grid.forward(b)
    return _dealias(out, grid, dealias)


def _rhs_novikov_v_coeffs(vc: np.ndarray, kit: NonlocalKit, dealias: bool = True) -> np.ndarray:
    # Novikov transported to the v variable through v = (1 - dx) u.
    uc = kit._om_inv * vc
    return kit._om * _rhs_forq_u_coeffs(uc, kit, dealias, drop_local_cubic=True)


_RHS_BY_VARIANT = {
    EquationVariant.FORQ_U: _rhs_forq_u_coeffs,
    EquationVariant.FORQ_V: _rhs_forq_v_coeffs,
    EquationVariant.NOVIKOV_U: lambda vc, kit, dealias=True: _rhs_forq_u_coeffs(
        vc, kit, dealias, drop_local_cubic=True
    ),
    EquationVariant.NOVIKOV_V: _rhs_novikov_v_coeffs,
}


def _wrap_rhs(fn):
    def wrapped(f: SpectralField, kit: NonlocalKit, dealias: bool = True) -> SpectralField:
        if not f.is_finite():
            raise BlowUpError(0.0, "non-finite input field")
        return SpectralField(f.grid, coeffs=fn(f.coeffs, kit, dealias))

    return wrapped


rhs_forq_u = _wrap_rhs(_rhs_forq_u_coeffs)
rhs_forq_v = _wrap_rhs(_rhs_forq_v_coeffs)
rhs_novikov_u = _wrap_rhs(_RHS_BY_VARIANT[EquationVariant.NOVIKOV_U])
rhs_novikov_v = _wrap_rhs(_rhs_novikov_v_coeffs)


def approximant(v0: SpectralField, kit: NonlocalKit) -> SpectralField:
    """First-order coefficient of the flow in time: d/dt v at t = 0."""
    return rhs_forq_v(v0, kit)


def u_from_v(v: SpectralField, kit: NonlocalKit) -> SpectralField:
    return SpectralField(v.grid, coeffs=kit._om_inv * v.coeffs)


def v_from_u(u: SpectralField, kit: NonlocalKit) -> SpectralField:
    return SpectralField(u.grid, coeffs=kit._om * u.coeffs)


def _check_state(coeffs: np.ndarray, grid: Grid, t: float, ceiling: float) -> None:
    if not np.all(np.isfinite(coeffs)):
        raise BlowUpError(t, f"non-finite coefficients at t = {t:.6g}")
    # ||u||_inf <= sum |coeffs|; only pay for an exact check when the
    # cheap bound crosses the ceiling
    if np.abs(coeffs).sum() > ceiling:
        if np.abs(grid.inverse(coeffs)).max() > ceiling:
            raise BlowUpError(t, f"sup-norm ceiling {ceiling:g} exceeded at t = {t:.6g}")


def evolve(
    f0: SpectralField,
    cfg: EvolutionConfig,
    times: list[float] | None = None,
    kit: NonlocalKit | None = None,
) -> list[tuple[float, SpectralField]]:
    """Classical RK4 integration, returning snapshots at requested times.

    Each requested time must be an integer multiple of cfg.dt (to within
    roundoff); snapshots are returned sorted by time.  A vanishing
    requested time returns the (dealiased) initial state.
    """
    kit = kit or NonlocalKit(cfg.grid)
    rhs = _RHS_BY_VARIANT[cfg.variant]
    if times is None:
        times = [cfg.t_end]
    times = sorted(set(float(t) for t in times))
    steps = []
    for t in times:
        n = t / cfg.dt
        if abs(n - round(n)) > 1e-9:
            raise ValueError(f"snapshot time {t} is not a multiple of dt = {cfg.dt}")
        steps.append(int(round(n)))
    if steps and steps[-1] * cfg.dt > cfg.t_end * (1 + 1e-12):
        raise ValueError("snapshot time beyond t_end")

    yc = _dealias(f0.coeffs.copy(), cfg.grid, cfg.dealias)
    out: list[tuple[float, SpectralField]] = []
    if steps and steps[0] == 0:
        out.append((0.0, SpectralField(cfg.grid, coeffs=yc.copy())))
        steps = steps[1:]
        times = times[1:]
    step = 0
    dt = cfg.dt
    for target_step, target_t in zip(steps, times):
        while step < target_step:
            t = step * dt
            k1 = rhs(yc, kit, cfg.dealias)
            k2 = rhs(yc + 0.5 * dt * k1, kit, cfg.dealias)
            k3 = rhs(yc + 0.5 * dt * k2, kit, cfg.dealias)
            k4 = rhs(yc + dt * k3, kit, cfg.dealias)
            yc = kernels.rk4_combine(yc, k1, k2, k3, k4, dt)
            step += 1
            _check_state(yc, cfg.grid, step * dt, cfg.blowup_ceiling)
        out.append((target_t, SpectralField(cfg.grid, coeffs=yc.copy())))
    return out


def self_convergence_ratio(
    f0: SpectralField, cfg: EvolutionConfig, kit: NonlocalKit | None = None
) -> dict:
    """Richardson-style order check: error ratio under dt halving.

    Runs the same problem at dt, dt/2 and dt/4 and reports
    ratio = ||y_dt - y_dt/2|| / ||y_dt/2 - y_dt/4||, which scales like
    2^order; classical RK4 gives ratio ~ 16.
    """
    kit = kit or NonlocalKit(cfg.grid)
    finals = []
    for k in range(3):
        c = EvolutionConfig(
            cfg.grid, cfg.dt / 2**k, cfg.t_end, cfg.variant, cfg.dealias,
            cfg.blowup_ceiling,
        )
        finals.append(evolve(f0, c, [cfg.t_end], kit)[0][1])
    e1 = np.linalg.norm((finals[0] - finals[1]).coeffs)
    e2 = np.linalg.norm((finals[1] - finals[2]).coeffs)
    ratio = float(e1 / e2) if e2 > 0 else math.inf
    return {
        "coarse_error": float(e1),
        "fine_error": float(e2),
        "ratio": ratio,
        "order": math.log2(ratio) if ratio not in (0.0, math.inf) else math.nan,
    }
