"""Rigid-body limit experiments: restriction operator, Bogovskii solver, coupled solver and diagnostics."""

from ._rigidlim import (
    RigidlimError,
    bogovskii_check,
    check_assumptions,
    fit_slope,
    rest_bound,
    restrict_field,
    restriction_scaling,
    sample_taylor_green,
    simulate,
    sobolev_study,
    sweep,
    taylor_green_velocity,
    tracer_trajectory,
)

__all__ = [
    "RigidlimError",
    "bogovskii_check",
    "check_assumptions",
    "fit_slope",
    "rest_bound",
    "restrict_field",
    "restriction_scaling",
    "sample_taylor_green",
    "simulate",
    "sobolev_study",
    "sweep",
    "taylor_green_velocity",
    "tracer_trajectory",
]
