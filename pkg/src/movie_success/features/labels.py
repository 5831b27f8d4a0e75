"""
Targets, economic-event indicator and budget imputation.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..errors import EmptyDataset, MissingBudget, MissingRevenue
from ..models import MovieRecord

logger = logging.getLogger(__name__)

SUCCESS_ROI = 0.5

# Release years with an industry-wide financing shock.
POSITIVE_EVENT_YEARS = frozenset({2005, 2010, 2014, 2018, 2019})
NEGATIVE_EVENT_YEARS = frozenset({2008, 2011, 2017, 2020, 2023})
EVENT_YEAR_RANGE = (2004, 2024)


def compute_roi(record: MovieRecord) -> float:
    """
    Opening-weekend revenue over production budget.

    Raises:
        MissingBudget: Budget absent or not positive
        MissingRevenue: Opening weekend absent
    """
    if record.budget is None or record.budget <= 0:
        raise MissingBudget("budget is missing or not positive", {"title": record.title, "budget": record.budget})
    if record.opening_weekend is None:
        raise MissingRevenue("opening weekend revenue is missing", {"title": record.title})
    return record.opening_weekend / record.budget


def compute_label(record: MovieRecord) -> int:
    """1 when the opening weekend reaches half the budget, else 0."""
    return int(compute_roi(record) >= SUCCESS_ROI)


def event_indicator(release_year: int, year_range: Tuple[int, int] = EVENT_YEAR_RANGE) -> float:
    """+1 for positive-shock years, -1 for negative-shock years, else 0."""
    if not (year_range[0] <= release_year <= year_range[1]):
        logger.warning("Release year %s outside %d-%d; event indicator set to 0", release_year, *year_range)
        return 0.0
    if release_year in POSITIVE_EVENT_YEARS:
        return 1.0
    if release_year in NEGATIVE_EVENT_YEARS:
        return -1.0
    return 0.0


@dataclass
class BudgetImputer:
    """
    Fills missing budgets with the median budget of films released within
    ``year_window`` years, falling back to the corpus median.

    Uses release year and budget only, never revenue, so fitting it on the
    whole corpus does not leak targets.
    """
    year_window: int = 2
    _years: np.ndarray = field(default=None, init=False, repr=False)
    _budgets: np.ndarray = field(default=None, init=False, repr=False)
    _global_median: float = field(default=None, init=False, repr=False)

    @property
    def is_fitted(self) -> bool:
        return self._global_median is not None

    def fit(self, records: Sequence[MovieRecord]) -> "BudgetImputer":
        known = [(r.release_year, r.budget) for r in records if r.budget is not None and r.budget > 0]
        if not known:
            raise EmptyDataset("no film has a usable budget to impute from")
        self._years = np.array([y for y, _ in known], dtype=float)
        self._budgets = np.array([b for _, b in known], dtype=float)
        self._global_median = float(np.median(self._budgets))
        return self

    def impute(self, release_year: int) -> float:
        if not self.is_fitted:
            raise MissingBudget("BudgetImputer used before fit")
        near = np.abs(self._years - release_year) <= self.year_window
        if not np.any(near):
            return self._global_median
        return float(np.median(self._budgets[near]))

    def apply(self, records: Sequence[MovieRecord]) -> List[MovieRecord]:
        """Copies of ``records`` with budgets filled; imputed ones are marked in metadata."""
        filled = []
        for record in records:
            if record.budget is not None and record.budget > 0:
                filled.append(record)
                continue
            budget = self.impute(record.release_year)
            metadata: Dict = {**record.metadata, "budget_imputed": True}
            filled.append(replace(record, budget=budget, metadata=metadata))
        n_imputed = sum(1 for r in filled if r.metadata.get("budget_imputed"))
        if n_imputed:
            logger.info("Imputed %d budgets from release-year neighbours", n_imputed)
        return filled
