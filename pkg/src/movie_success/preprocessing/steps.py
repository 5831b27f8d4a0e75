"""
Concrete column steps: imputation, winsorization, power transform, scaling.
"""

import logging
from typing import Any, Dict

import numpy as np

from ..errors import ContractViolation, DegenerateColumn
from ..features.power import fit_yeo_johnson, yeo_johnson
from ..features.winsorize import WinsorBounds, fit_winsor_bounds
from .base import BaseStep, StepPipeline

logger = logging.getLogger(__name__)


class MedianImputer(BaseStep):
    """
    Replaces NaN with the training median.

    A column with no observed training value is filled with 0.
    """

    def _fit(self, values: np.ndarray):
        observed = values[np.isfinite(values)]
        if observed.size == 0:
            logger.warning("Column %s has no observed training values; imputing 0",
                           self.context.get("column", "?"))
            self.median = 0.0
        else:
            self.median = float(np.median(observed))

    def _transform(self, values: np.ndarray) -> np.ndarray:
        return np.where(np.isfinite(values), values, self.median)

    def params(self) -> Dict[str, Any]:
        return {"median": self.median}


class Winsorizer(BaseStep):
    """Clips to training quantiles (linear interpolation)."""

    def __init__(self, p_low: float = 0.01, p_high: float = 0.99):
        super().__init__()
        self.p_low = p_low
        self.p_high = p_high

    def _fit(self, values: np.ndarray):
        self.bounds: WinsorBounds = fit_winsor_bounds(values, self.p_low, self.p_high)

    def _transform(self, values: np.ndarray) -> np.ndarray:
        return self.bounds.apply(values)

    def params(self) -> Dict[str, Any]:
        return {"low": self.bounds.low, "high": self.bounds.high}


class YeoJohnsonStep(BaseStep):
    """
    Yeo-Johnson transform with an exponent fitted on training rows.

    Columns too short or constant to fit keep lambda = 1 (identity).
    """

    def _fit(self, values: np.ndarray):
        column = self.context.get("column", "")
        try:
            self.lambda_yj = fit_yeo_johnson(values, name=column).lambda_yj
        except (DegenerateColumn, ContractViolation) as exc:
            logger.warning("Yeo-Johnson fit skipped for %s (%s); using lambda=1", column or "?", exc)
            self.lambda_yj = 1.0

    def _transform(self, values: np.ndarray) -> np.ndarray:
        return yeo_johnson(values, self.lambda_yj)

    def params(self) -> Dict[str, Any]:
        return {"lambda_yj": self.lambda_yj}


class Standardizer(BaseStep):
    """Z-scores with training mean and standard deviation (unit scale when constant)."""

    def _fit(self, values: np.ndarray):
        self.mean = float(np.mean(values))
        std = float(np.std(values))
        self.scale = std if std > 0 else 1.0

    def _transform(self, values: np.ndarray) -> np.ndarray:
        return (values - self.mean) / self.scale

    def params(self) -> Dict[str, Any]:
        return {"mean": self.mean, "scale": self.scale}


def column_pipeline(transform: str, p_low: float = 0.01, p_high: float = 0.99):
    """
    Steps for a schema transform tag.

    - "none": imputation only
    - "standard": impute, winsorize, standardize
    - "yeo_johnson": impute, winsorize, Yeo-Johnson, standardize
    """
    if transform == "none":
        return StepPipeline([MedianImputer()])
    if transform == "standard":
        return StepPipeline([MedianImputer(), Winsorizer(p_low, p_high), Standardizer()])
    if transform == "yeo_johnson":
        return StepPipeline([MedianImputer(), Winsorizer(p_low, p_high), YeoJohnsonStep(), Standardizer()])
    raise ContractViolation(f"unknown column transform {transform!r}")
