"""
SIR diffusion models: compartments, rates, trajectories and derived features.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import ContractViolation

SIMPLEX_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SIRState:
    """
    Normalized population compartments at a point in time.

    Attributes:
        s: Susceptible fraction (exposed, not yet engaging)
        i: Infected fraction (actively posting and spreading)
        r: Recovered fraction (disengaged)
        t: Days since release
    """
    s: float
    i: float
    r: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("s", "i", "r"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ContractViolation(
                    f"SIRState.{name} must be in [0, 1], got {value}",
                    {"field": name, "value": value},
                )
        if abs(self.s + self.i + self.r - 1.0) > SIMPLEX_TOLERANCE:
            raise ContractViolation(
                "SIRState compartments must sum to 1",
                {"sum": self.s + self.i + self.r},
            )
        if not (self.t >= 0.0):
            raise ContractViolation(f"SIRState.t must be >= 0, got {self.t}")

    @property
    def total(self) -> float:
        return self.s + self.i + self.r

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.s, self.i, self.r)

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "s": self.s, "i": self.i, "r": self.r}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SIRState":
        return cls(s=data["s"], i=data["i"], r=data["r"], t=data.get("t", 0.0))


@dataclass(frozen=True)
class SIRParams:
    """
    Contact and recovery rates per day.

    Attributes:
        beta: Contact (infection) rate, >= 0
        gamma: Recovery rate, > 0
        gamma_floored: True when gamma was raised to the estimator floor
            because no negative first-week reviews existed
    """
    beta: float
    gamma: float
    gamma_floored: bool = False

    def __post_init__(self):
        if not (self.beta >= 0.0 and math.isfinite(self.beta)):
            raise ContractViolation(f"beta must be finite and >= 0, got {self.beta}")
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ContractViolation(f"gamma must be finite and > 0, got {self.gamma}")

    @property
    def basic_reproduction_number(self) -> float:
        return self.beta / self.gamma

    def to_dict(self) -> Dict[str, Any]:
        return {"beta": self.beta, "gamma": self.gamma, "gamma_floored": self.gamma_floored}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SIRParams":
        return cls(
            beta=data["beta"],
            gamma=data["gamma"],
            gamma_floored=bool(data.get("gamma_floored", False)),
        )


@dataclass(frozen=True)
class SIRTrajectory:
    """Fixed-step sequence of states starting at the initial condition."""
    states: Tuple[SIRState, ...]
    dt: float

    def __post_init__(self):
        if not (self.dt > 0):
            raise ContractViolation(f"trajectory dt must be > 0, got {self.dt}")
        for prev, cur in zip(self.states, self.states[1:]):
            if not cur.t > prev.t:
                raise ContractViolation("trajectory timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def initial(self) -> SIRState:
        return self.states[0]

    @property
    def final(self) -> SIRState:
        return self.states[-1]

    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.states])

    def as_array(self) -> np.ndarray:
        """Return an (n, 4) array with columns t, s, i, r."""
        return np.array([(st.t, st.s, st.i, st.r) for st in self.states], dtype=float)

    def to_records(self) -> List[Dict[str, float]]:
        return [st.to_dict() for st in self.states]


@dataclass(frozen=True)
class SIRFeatures:
    """
    Virality features derived from the initial state, rates and trajectory.

    Ratio features are None when s0 = 0; downstream imputation fills them.
    """
    i0_s0_ratio: Optional[float]
    r0_s0_ratio: Optional[float]
    basic_reproduction_number: float
    effective_contact_rate: float
    peak_infected: float
    time_to_peak: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "i0_s0_ratio": self.i0_s0_ratio,
            "r0_s0_ratio": self.r0_s0_ratio,
            "basic_reproduction_number": self.basic_reproduction_number,
            "effective_contact_rate": self.effective_contact_rate,
            "peak_infected": self.peak_infected,
            "time_to_peak": self.time_to_peak,
        }


@dataclass(frozen=True)
class TimelineEntry:
    """One review on a film's timeline."""
    day: float
    is_negative: bool
    author_id: Optional[str] = None


@dataclass(frozen=True)
class ReviewTimeline:
    """
    Review arrival history of a single film, the input of the estimators.

    Attributes:
        review_timestamps: Entries of (days since release, is_negative, author)
        total_reviewers: Distinct authors who reviewed the film
        total_comments: Reviews posted (one author may post several)
    """
    review_timestamps: Tuple[TimelineEntry, ...]
    total_reviewers: int
    total_comments: int
    first_week_days: float = field(default=7.0)

    def __post_init__(self):
        if self.total_reviewers <= 0 or self.total_comments <= 0:
            raise ContractViolation(
                "timeline counts must be positive",
                {"total_reviewers": self.total_reviewers, "total_comments": self.total_comments},
            )
        if self.total_reviewers > self.total_comments:
            raise ContractViolation(
                "total_reviewers cannot exceed total_comments",
                {"total_reviewers": self.total_reviewers, "total_comments": self.total_comments},
            )
        if any(entry.day < 0 for entry in self.review_timestamps):
            raise ContractViolation("timeline days must be >= 0")

    def first_week(self) -> List[TimelineEntry]:
        """Entries with day in [0, first_week_days)."""
        return [e for e in self.review_timestamps if e.day < self.first_week_days]

    def first_week_commenters(self) -> int:
        """Distinct first-week authors; entries without an author count once each."""
        return _distinct_authors(self.first_week())

    def first_week_negative_reviewers(self) -> int:
        return _distinct_authors([e for e in self.first_week() if e.is_negative])

    def first_week_comments(self) -> int:
        return len(self.first_week())

    def first_week_negative_comments(self) -> int:
        return sum(1 for e in self.first_week() if e.is_negative)

    @classmethod
    def from_counts(
        cls,
        first_week_commenters: int,
        first_week_negatives: int,
        total_reviewers: int,
        total_comments: Optional[int] = None,
    ) -> "ReviewTimeline":
        """
        Build a timeline with one anonymous first-week review per commenter.

        The first ``first_week_negatives`` of them are negative. Remaining
        comments are placed at day 30.
        """
        total_comments = total_comments if total_comments is not None else total_reviewers
        entries = [
            TimelineEntry(day=0.0, is_negative=k < first_week_negatives, author_id=f"fw{k}")
            for k in range(first_week_commenters)
        ]
        entries += [
            TimelineEntry(day=30.0, is_negative=False, author_id=None)
            for _ in range(max(total_comments - first_week_commenters, 0))
        ]
        return cls(tuple(entries), total_reviewers=total_reviewers, total_comments=total_comments)


def _distinct_authors(entries: List[TimelineEntry]) -> int:
    named = {e.author_id for e in entries if e.author_id is not None}
    anonymous = sum(1 for e in entries if e.author_id is None)
    return len(named) + anonymous
