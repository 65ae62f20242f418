"""Adiabatic times of time-inhomogeneous Markov chains."""

from ._core import (
    AdiabaticSpec,
    Error,
    NonUniqueStationary,
    Schedule,
    SearchTimeoutError,
    ValidationError,
    adiabatic_time,
    evolve,
    example,
    faulhaber_sum,
    fit_scaling_exponent,
    glauber_spec,
    kovchegov_bound,
    mixing_time,
    sample_final_counts,
    shift_lower_bound,
    worst_case_tv,
)

__all__ = [
    "AdiabaticSpec",
    "Error",
    "NonUniqueStationary",
    "Schedule",
    "SearchTimeoutError",
    "ValidationError",
    "adiabatic_time",
    "evolve",
    "example",
    "faulhaber_sum",
    "fit_scaling_exponent",
    "glauber_spec",
    "kovchegov_bound",
    "mixing_time",
    "sample_final_counts",
    "shift_lower_bound",
    "worst_case_tv",
]
