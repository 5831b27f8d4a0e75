"""
Virality features read off the initial state, rates and trajectory.
"""

import logging
from typing import List, Sequence

import numpy as np

from ..errors import ContractViolation
from ..models import SIRFeatures, SIRParams, SIRState, SIRTrajectory
from .dynamics import simulate_batch

logger = logging.getLogger(__name__)


def derived_features(initial: SIRState, params: SIRParams, traj: SIRTrajectory) -> SIRFeatures:
    """
    Ratio features plus peak statistics of the infected curve.

    Ratios over S0 are None when S0 = 0 and are filled by imputation
    downstream.
    """
    if traj.initial.as_tuple() != initial.as_tuple():
        raise ContractViolation("trajectory does not start at the given initial state")

    if initial.s > 0:
        i0_s0 = initial.i / initial.s
        r0_s0 = initial.r / initial.s
    else:
        i0_s0 = r0_s0 = None

    data = traj.as_array()
    peak_index = int(np.argmax(data[:, 2]))
    return SIRFeatures(
        i0_s0_ratio=i0_s0,
        r0_s0_ratio=r0_s0,
        basic_reproduction_number=params.beta / params.gamma,
        effective_contact_rate=params.beta * initial.s,
        peak_infected=float(data[peak_index, 2]),
        time_to_peak=float(data[peak_index, 0] - data[0, 0]),
    )


def batch_features(
    initials: Sequence[SIRState],
    params: Sequence[SIRParams],
    dt: float = 0.01,
    horizon: float = 90.0,
) -> List[SIRFeatures]:
    """
    :func:`derived_features` for many films through one vectorised simulation.
    """
    if len(initials) != len(params):
        raise ContractViolation("initials and params differ in length")
    if not initials:
        return []

    batch = simulate_batch(
        s0=np.array([st.s for st in initials]),
        i0=np.array([st.i for st in initials]),
        r0=np.array([st.r for st in initials]),
        beta=np.array([p.beta for p in params]),
        gamma=np.array([p.gamma for p in params]),
        dt=dt,
        horizon=horizon,
    )
    features = []
    for j, (state, rates) in enumerate(zip(initials, params)):
        positive_s = state.s > 0
        features.append(
            SIRFeatures(
                i0_s0_ratio=state.i / state.s if positive_s else None,
                r0_s0_ratio=state.r / state.s if positive_s else None,
                basic_reproduction_number=rates.beta / rates.gamma,
                effective_contact_rate=rates.beta * state.s,
                peak_infected=float(batch.peak_infected[j]),
                time_to_peak=float(batch.time_to_peak[j]),
            )
        )
    logger.debug("Derived SIR features for %d films", len(features))
    return features
