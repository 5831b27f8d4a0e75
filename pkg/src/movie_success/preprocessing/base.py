"""
Base classes for the column preprocessing pipeline.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List

import numpy as np

from ..errors import ContractViolation


class BaseStep(ABC):
    """
    One fitted column transform.

    ``fit`` learns statistics from training rows only; ``transform`` reads
    them without mutating, so a fitted step is safe to share across threads
    and to apply to test rows.
    """

    def __init__(self):
        self.name = self.__class__.__name__
        self.context: Dict[str, Any] = {}
        self._fitted = False

    @property
    def is_fitted(self) -> bool:
        return self._fitted

    @abstractmethod
    def _fit(self, values: np.ndarray):
        """Learn statistics from a 1-D training column."""

    @abstractmethod
    def _transform(self, values: np.ndarray) -> np.ndarray:
        """Apply fitted statistics to a 1-D column."""

    def params(self) -> Dict[str, Any]:
        """Fitted statistics, written to preprocessing.json."""
        return {}

    def fit(self, values, context: Dict[str, Any] = None) -> "BaseStep":
        """
        Fit on a training column.

        Args:
            values: Training column, NaN allowed where the step handles it
            context: Extra information for messages, e.g. ``{"column": "beta"}``
        """
        self.context = dict(context or {})
        self._fit(np.asarray(values, dtype=float))
        self._fitted = True
        return self

    def transform(self, values) -> np.ndarray:
        if not self._fitted:
            raise ContractViolation(f"{self.name} used before fit", dict(self.context))
        return self._transform(np.asarray(values, dtype=float))

    def fit_transform(self, values, context: Dict[str, Any] = None) -> np.ndarray:
        return self.fit(values, context).transform(values)

    def __repr__(self) -> str:
        return f"{self.name}(fitted={self.is_fitted})"


class StepPipeline:
    """
    Steps applied in order, each fitted on the previous step's output.

    Example:
        pipeline = StepPipeline([MedianImputer(), Winsorizer(), YeoJohnsonStep(), Standardizer()])
        train_column = pipeline.fit_transform(train_values, {"column": "beta"})
        test_column = pipeline.transform(test_values)
    """

    def __init__(self, steps: List[BaseStep]):
        self.steps = list(steps)

    def fit(self, values, context: Dict[str, Any] = None) -> "StepPipeline":
        current = np.asarray(values, dtype=float)
        for step in self.steps:
            current = step.fit_transform(current, context)
        return self

    def transform(self, values) -> np.ndarray:
        current = np.asarray(values, dtype=float)
        for step in self.steps:
            current = step.transform(current)
        return current

    def fit_transform(self, values, context: Dict[str, Any] = None) -> np.ndarray:
        return self.fit(values, context).transform(values)

    def params(self) -> Dict[str, Dict[str, Any]]:
        return {step.name: step.params() for step in self.steps}

    def __len__(self) -> int:
        return len(self.steps)

    def __repr__(self) -> str:
        return f"StepPipeline({[s.name for s in self.steps]})"
