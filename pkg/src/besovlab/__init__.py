"""Numerical laboratory for dyadic (Littlewood-Paley) frequency analysis
and pseudospectral evolution of cubic nonlocal shallow-water equations.

The package provides:

* a periodic spectral grid with exact Fourier-multiplier calculus,
* a smooth dyadic partition of unity and discrete Besov norms,
* right-hand sides and RK4 evolution for the cubic nonlocal systems in
  both the u and v = (1 - dx) u formulations,
* the band-limited initial-data families whose evolutions separate at a
  rate independent of their vanishing initial distance,
* experiment sweeps with CSV/JSON output and power-law fits.
"""

from .grid import (
    DEALIAS_FRACTION,
    Grid,
    GridError,
    Multiplier,
    SpectralField,
    apply_multiplier,
    derivative,
    dx_helmholtz_inverse,
    helmholtz_inverse,
    lp_norm,
    make_grid,
    multiplier_from_function,
    one_minus_dx,
    one_minus_dx_inv,
)
from .littlewood_paley import (
    BesovIndex,
    DyadicPartition,
    ResolutionWarning,
    besov_norm,
    block,
    block_energies,
    block_lp_norms,
    build_partition,
    check_product_estimate,
    low_cut,
    smooth_step,
)
from .equations import (
    BlowUpError,
    EquationVariant,
    EvolutionConfig,
    NonlocalKit,
    approximant,
    evolve,
    rhs_forq_u,
    rhs_forq_v,
    rhs_novikov_u,
    rhs_novikov_v,
    self_convergence_ratio,
    u_from_v,
    v_from_u,
)
from .counterexamples import (
    CARRIER_RATIO,
    BumpSpec,
    CounterexamplePair,
    KeyTerm,
    RiemannReport,
    key_term,
    make_fn,
    make_gn,
    make_pair,
    make_phi,
    riemann_limit,
    sin_average_factor,
)
from .experiments import (
    ExperimentRecord,
    FitResult,
    NonuniformSummary,
    drift_exponent,
    emit_csv,
    fit_power_law,
    read_csv,
    run_nonuniform,
    run_prop2,
    run_prop3,
    summarize_nonuniform,
    write_manifest,
)
from .validate import SuiteResult, random_band_limited, run_suites

__version__ = "0.1.0"
