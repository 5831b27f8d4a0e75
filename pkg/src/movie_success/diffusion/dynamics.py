"""
Fixed-step Euler integration of the normalized SIR system.

With N = 1 the system reads

    dS/dt = -beta * S * I
    dI/dt =  beta * S * I - gamma * I
    dR/dt =  gamma * I

Each step is clamped to [0, 1] componentwise and renormalized so every
returned state lies on the simplex.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Any

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..errors import ContractViolation
from ..models import SIRState, SIRParams, SIRTrajectory

logger = logging.getLogger(__name__)

# Guards ceil() against dt that do not divide the horizon exactly in binary.
_STEP_SLACK = 1e-9


def _check_dt(dt: float):
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        raise ContractViolation(f"dt must be a finite positive number, got {dt!r}", {"dt": dt})


def _renormalize(s: float, i: float, r: float):
    s = min(max(s, 0.0), 1.0)
    i = min(max(i, 0.0), 1.0)
    r = min(max(r, 0.0), 1.0)
    total = s + i + r
    if total <= 0.0:
        raise ContractViolation("Euler step left the simplex entirely", {"s": s, "i": i, "r": r})
    return s / total, i / total, r / total


def step_count(dt: float, horizon: float) -> int:
    """Number of Euler steps needed to cover ``horizon``."""
    return int(math.ceil(horizon / dt - _STEP_SLACK))


def euler_step(state: SIRState, params: SIRParams, dt: float) -> SIRState:
    """
    Advance one explicit Euler step.

    Args:
        state: Current compartments
        params: Contact and recovery rates
        dt: Step size in days (> 0)

    Returns:
        State at ``state.t + dt``
    """
    _check_dt(dt)
    if not isinstance(state, SIRState):
        raise ContractViolation("euler_step expects an SIRState")

    infection = params.beta * state.s * state.i * dt
    recovery = params.gamma * state.i * dt
    s, i, r = _renormalize(
        state.s - infection,
        state.i + infection - recovery,
        state.r + recovery,
    )
    return SIRState(s=s, i=i, r=r, t=state.t + dt)


def simulate(initial: SIRState, params: SIRParams, dt: float, horizon: float) -> SIRTrajectory:
    """
    Integrate from ``initial`` over ``horizon`` days.

    The trajectory holds ``ceil(horizon / dt) + 1`` states; timestamps are
    ``initial.t + k * dt`` so they do not accumulate rounding drift.
    """
    _check_dt(dt)
    if not (math.isfinite(horizon) and horizon > 0):
        raise ContractViolation(f"horizon must be > 0, got {horizon}", {"horizon": horizon})
    if dt > horizon:
        raise ContractViolation("dt must not exceed horizon", {"dt": dt, "horizon": horizon})

    n_steps = step_count(dt, horizon)
    beta, gamma = params.beta, params.gamma
    s, i, r = initial.s, initial.i, initial.r
    t0 = initial.t

    states = [initial]
    for k in range(1, n_steps + 1):
        infection = beta * s * i * dt
        recovery = gamma * i * dt
        s, i, r = _renormalize(s - infection, i + infection - recovery, r + recovery)
        states.append(SIRState(s=s, i=i, r=r, t=t0 + k * dt))

    logger.debug("Simulated %d steps (dt=%g, horizon=%g, R0=%.4f)",
                 n_steps, dt, horizon, params.basic_reproduction_number)
    return SIRTrajectory(tuple(states), dt)


@dataclass(frozen=True)
class BatchDiffusion:
    """Per-film summaries of a vectorised simulation."""
    peak_infected: np.ndarray
    time_to_peak: np.ndarray
    final_s: np.ndarray
    final_i: np.ndarray
    final_r: np.ndarray

    def __len__(self) -> int:
        return int(self.peak_infected.shape[0])


def simulate_batch(
    s0: np.ndarray,
    i0: np.ndarray,
    r0: np.ndarray,
    beta: np.ndarray,
    gamma: np.ndarray,
    dt: float = 0.01,
    horizon: float = 90.0,
) -> BatchDiffusion:
    """
    Simulate many films at once and keep only peak statistics.

    Uses the same arithmetic as :func:`simulate`, so the peak of film ``j``
    equals the scalar path's peak for the same inputs.

    Args:
        s0, i0, r0: Initial compartments, one entry per film
        beta, gamma: Rates, one entry per film
        dt: Step size in days
        horizon: Simulated days

    Returns:
        BatchDiffusion with the first time each film reached its maximum I
    """
    _check_dt(dt)
    if dt > horizon:
        raise ContractViolation("dt must not exceed horizon", {"dt": dt, "horizon": horizon})

    s = np.asarray(s0, dtype=float).copy()
    i = np.asarray(i0, dtype=float).copy()
    r = np.asarray(r0, dtype=float).copy()
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    shapes = {a.shape for a in (s, i, r, beta, gamma)}
    if len(shapes) != 1 or s.ndim != 1:
        raise ContractViolation("batch inputs must be 1-D arrays of equal length", {"shapes": sorted(shapes)})
    if np.any(beta < 0) or np.any(gamma <= 0):
        raise ContractViolation("batch rates need beta >= 0 and gamma > 0")

    peak = i.copy()
    peak_step = np.zeros(s.shape[0], dtype=np.int64)
    for k in range(1, step_count(dt, horizon) + 1):
        infection = beta * s * i * dt
        recovery = gamma * i * dt
        s = np.clip(s - infection, 0.0, 1.0)
        i = np.clip(i + infection - recovery, 0.0, 1.0)
        r = np.clip(r + recovery, 0.0, 1.0)
        total = s + i + r
        s, i, r = s / total, i / total, r / total
        rising = i > peak
        peak = np.where(rising, i, peak)
        peak_step = np.where(rising, k, peak_step)

    return BatchDiffusion(
        peak_infected=peak,
        time_to_peak=peak_step * dt,
        final_s=s,
        final_i=i,
        final_r=r,
    )


@dataclass(frozen=True)
class TrajectoryResiduals:
    """
    Deviation of an Euler trajectory from the integral forms of the system.

    The ``*_form`` fields are taken at the final time, the ``*_max`` fields
    over the whole grid.

    Attributes:
        r_form: |R(T) - R0 - gamma * int_0^T I|
        s_form: |S(T) - S0 * exp(-beta * int_0^T I)|
        i_form: |I(T) - I0 - beta * int_0^T S I + gamma * int_0^T I|
        r_form_max: r_form maximised over t
        s_form_max: s_form maximised over t
        i_form_max: i_form maximised over t
    """
    r_form: float
    s_form: float
    i_form: float
    r_form_max: float
    s_form_max: float
    i_form_max: float

    @property
    def residual(self) -> float:
        """The recovered-compartment residual at the final time, the primary oracle."""
        return self.r_form

    @property
    def maximum(self) -> float:
        return max(self.r_form_max, self.s_form_max, self.i_form_max)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r_form": self.r_form,
            "s_form": self.s_form,
            "i_form": self.i_form,
            "r_form_max": self.r_form_max,
            "s_form_max": self.s_form_max,
            "i_form_max": self.i_form_max,
        }


def validate_trajectory(traj: SIRTrajectory, params: SIRParams) -> TrajectoryResiduals:
    """
    Compare a trajectory with the integral form of the SIR system.

    Integrals are evaluated with the trapezoidal rule on the trajectory's own
    grid, so the residuals shrink as O(dt) for an Euler trajectory.
    """
    if len(traj) < 3:
        raise ContractViolation("validate_trajectory needs at least 3 states", {"length": len(traj)})

    data = traj.as_array()
    t, s, i, r = data[:, 0], data[:, 1], data[:, 2], data[:, 3]
    int_i = cumulative_trapezoid(i, t, initial=0.0)
    int_si = cumulative_trapezoid(s * i, t, initial=0.0)

    r_form = np.abs(r - r[0] - params.gamma * int_i)
    s_form = np.abs(s - s[0] * np.exp(-params.beta * int_i))
    i_form = np.abs(i - i[0] - params.beta * int_si + params.gamma * int_i)
    return TrajectoryResiduals(
        r_form=float(r_form[-1]),
        s_form=float(s_form[-1]),
        i_form=float(i_form[-1]),
        r_form_max=float(r_form.max()),
        s_form_max=float(s_form.max()),
        i_form_max=float(i_form.max()),
    )
