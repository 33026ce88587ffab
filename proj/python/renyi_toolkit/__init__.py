"""Renyi entropies, Fisher informations and their sharp inequalities."""

from ._core import (
    ConditionError,
    ConvergenceError,
    Density,
    DomainError,
    FlowTrace,
    InputError,
    UnsupportedRegion,
    VerdictReport,
    bell_polynomials,
    cm_bound_check,
    cm_bound_coefficients,
    cramer_rao_matrix,
    cramer_rao_renyi,
    cramer_rao_tsallis,
    cramer_rao_weighted,
    cramer_rao_weighted_chain,
    density,
    functional,
    gamma_ratio_gap,
    gaussian_isoperimetric_value,
    grid_density,
    heat_trace,
    isoperimetric_check,
    log_gamma,
    log_tsallis_cm_bound,
    log_tsallis_cm_check,
    moment_entropy_check,
    nagy_w,
    omega_bounds_1d,
    optimal_constant,
    parse_sweep,
    renyi_entropy,
    renyi_fisher,
    renyi_power,
    run_suite,
    solve_profile,
    suite_names,
    tsallis_fisher,
    weighted_fisher,
    weighted_isoperimetric_constant,
    weighted_isoperimetric_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
