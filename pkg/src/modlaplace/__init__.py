"""Resumming divergent mass expansions with a cut-off Laplace representation.

Importing the package raises mpmath's working precision to
:data:`~modlaplace.precision.DEFAULT_DPS` digits if it is below the package
minimum; use :func:`set_precision` or :func:`working_precision` to change it.
"""

from mpmath import mp

from .precision import (
    DEFAULT_DPS,
    MIN_DPS,
    ConvergenceError,
    DomainError,
    gamma,
    get_precision,
    lower_incomplete_gamma,
    set_precision,
    upper_gamma_asymptotic,
    upper_incomplete_gamma,
    working_precision,
)
from .series import (
    CacheFormatError,
    Model,
    PerturbationSeries,
    PowerTerm,
    anharmonic_coefficients,
    build_series,
    cache_read,
    cache_write,
    nongaussian_coefficients,
)
from .heaviside import (
    HeavisideSeries,
    TransformError,
    alpha_k,
    derivative,
    evaluate,
    evaluate_with_error,
    heaviside_transform,
)
from .resummation import (
    ApproximantResult,
    NoStationaryPoint,
    RootRefinementError,
    StationaryPoint,
    approximant,
    beta_scan,
    correction_coefficients,
    find_stationary_points,
    remainder_bound_check,
    scaling_diagnostic,
    select_x_star,
    strong_coupling_expansion,
)
from .oracles import OracleResult, aho_ground_energy, pinned_constants, z_exact, z_hat_exact
from .delta import delta_kernel, dn_on_power, dn_vs_heaviside

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_DPS",
    "MIN_DPS",
    "ConvergenceError",
    "DomainError",
    "gamma",
    "get_precision",
    "lower_incomplete_gamma",
    "set_precision",
    "upper_gamma_asymptotic",
    "upper_incomplete_gamma",
    "working_precision",
    "CacheFormatError",
    "Model",
    "PerturbationSeries",
    "PowerTerm",
    "anharmonic_coefficients",
    "build_series",
    "cache_read",
    "cache_write",
    "nongaussian_coefficients",
    "HeavisideSeries",
    "TransformError",
    "alpha_k",
    "derivative",
    "evaluate",
    "evaluate_with_error",
    "heaviside_transform",
    "ApproximantResult",
    "NoStationaryPoint",
    "RootRefinementError",
    "StationaryPoint",
    "approximant",
    "beta_scan",
    "correction_coefficients",
    "find_stationary_points",
    "remainder_bound_check",
    "scaling_diagnostic",
    "select_x_star",
    "strong_coupling_expansion",
    "OracleResult",
    "aho_ground_energy",
    "pinned_constants",
    "z_exact",
    "z_hat_exact",
    "delta_kernel",
    "dn_on_power",
    "dn_vs_heaviside",
    "__version__",
]

if mp.dps < MIN_DPS:
    mp.dps = DEFAULT_DPS
