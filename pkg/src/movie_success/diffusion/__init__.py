"""
SIR information-diffusion modelling of review activity.

- dynamics: Euler integration and the integral-form residual check
- estimators: initial conditions and rates from a review timeline
- features: virality features derived from a simulated trajectory
"""

from .dynamics import (
    BatchDiffusion,
    TrajectoryResiduals,
    euler_step,
    simulate,
    simulate_batch,
    step_count,
    validate_trajectory,
)
from .estimators import (
    GAMMA_FLOOR,
    build_timeline,
    estimate_initial_conditions,
    estimate_rates,
    is_negative_review,
)
from .features import batch_features, derived_features

__all__ = [
    "BatchDiffusion",
    "TrajectoryResiduals",
    "euler_step",
    "simulate",
    "simulate_batch",
    "step_count",
    "validate_trajectory",
    "GAMMA_FLOOR",
    "build_timeline",
    "estimate_initial_conditions",
    "estimate_rates",
    "is_negative_review",
    "batch_features",
    "derived_features",
]
