"""
Feature-vector assembly, target scaling and feature matrices.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import ContractViolation, EmptyDataset
from ..models import FeatureGroup, FeatureSchema, FeatureVector

LABEL_COLUMN = "label_success"
TARGET_COLUMN = "target_revenue_scaled"
TITLE_COLUMN = "title"


@dataclass
class TargetScaler:
    """
    log1p followed by a z-score, with statistics from training rows only.
    """
    mean: Optional[float] = None
    scale: Optional[float] = None

    @property
    def is_fitted(self) -> bool:
        return self.mean is not None

    def fit(self, opening_weekend: Sequence[float]) -> "TargetScaler":
        logged = np.log1p(np.asarray(opening_weekend, dtype=float))
        if logged.size == 0:
            raise EmptyDataset("cannot fit the target scaler on zero rows")
        self.mean = float(np.mean(logged))
        std = float(np.std(logged))
        self.scale = std if std > 0 else 1.0
        return self

    def transform(self, opening_weekend) -> np.ndarray:
        if not self.is_fitted:
            raise ContractViolation("TargetScaler used before fit")
        return (np.log1p(np.asarray(opening_weekend, dtype=float)) - self.mean) / self.scale

    def inverse(self, scaled) -> np.ndarray:
        """Scaled values back to currency units."""
        return np.expm1(np.asarray(scaled, dtype=float) * self.scale + self.mean)

    def to_dict(self) -> Dict[str, float]:
        return {"mean": self.mean, "scale": self.scale}


def assemble(
    columns: Mapping[str, float],
    pca_scores: Sequence[float],
    event: float,
    label: int,
    target_scaled: float,
    mask: Iterable[FeatureGroup] = (),
    schema: Optional[FeatureSchema] = None,
) -> FeatureVector:
    """
    Lay out one film's processed features in schema order.

    Args:
        columns: Processed values by feature name (SIR, sentiment, base)
        pca_scores: Leading PCA scores, filling pc1, pc2, ...
        event: Economic-event indicator
        label: Success label (0/1)
        target_scaled: Scaled opening-weekend target
        mask: Groups to drop entirely
        schema: Layout; the packaged schema when omitted

    Raises:
        ContractViolation: If the mask drops every group, a value is missing
            or a value is not finite
    """
    schema = schema or FeatureSchema.default()
    drop: FrozenSet[FeatureGroup] = frozenset(mask)
    layout = schema.masked(drop)

    lookup: Dict[str, float] = dict(columns)
    for j, score in enumerate(pca_scores):
        lookup[f"pc{j + 1}"] = score
    lookup["event_indicator"] = event

    values = []
    for name in layout.names:
        if name not in lookup:
            raise ContractViolation(f"no value for feature {name!r}")
        value = float(lookup[name])
        if not math.isfinite(value):
            raise ContractViolation(f"feature {name!r} is not finite after imputation", {"value": value})
        values.append(value)

    return FeatureVector(
        values=tuple(values),
        names=tuple(layout.names),
        label_success=int(label),
        target_revenue_scaled=float(target_scaled),
        dropped_groups=drop,
    )


@dataclass
class FeatureMatrix:
    """
    A stack of feature vectors with their targets, as written to CSV.
    """
    values: np.ndarray
    names: Tuple[str, ...]
    labels: np.ndarray
    targets: np.ndarray
    titles: Tuple[str, ...] = ()
    dropped_groups: FrozenSet[FeatureGroup] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ContractViolation("feature matrix width does not match its names")
        if not (self.values.shape[0] == self.labels.shape[0] == self.targets.shape[0]):
            raise ContractViolation("feature matrix rows and targets differ in length")

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector], titles: Sequence[str] = ()) -> "FeatureMatrix":
        if not vectors:
            raise EmptyDataset("no feature vectors to stack")
        return cls(
            values=np.array([v.values for v in vectors], dtype=float),
            names=vectors[0].names,
            labels=np.array([v.label_success for v in vectors], dtype=float),
            targets=np.array([v.target_revenue_scaled for v in vectors], dtype=float),
            titles=tuple(titles),
            dropped_groups=vectors[0].dropped_groups,
        )

    def subset(self, indices) -> "FeatureMatrix":
        indices = np.asarray(indices, dtype=int)
        return FeatureMatrix(
            values=self.values[indices],
            names=self.names,
            labels=self.labels[indices],
            targets=self.targets[indices],
            titles=tuple(self.titles[i] for i in indices) if self.titles else (),
            dropped_groups=self.dropped_groups,
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=list(self.names))
        if self.titles:
            frame.insert(0, TITLE_COLUMN, list(self.titles))
        frame[LABEL_COLUMN] = self.labels.astype(int)
        frame[TARGET_COLUMN] = self.targets
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "FeatureMatrix":
        missing = [c for c in (LABEL_COLUMN, TARGET_COLUMN) if c not in frame.columns]
        if missing:
            raise ContractViolation("feature table lacks target columns", {"missing": missing})
        names = [c for c in frame.columns if c not in (TITLE_COLUMN, LABEL_COLUMN, TARGET_COLUMN)]
        titles = tuple(frame[TITLE_COLUMN].astype(str)) if TITLE_COLUMN in frame.columns else ()
        return cls(
            values=frame[names].to_numpy(dtype=float),
            names=tuple(names),
            labels=frame[LABEL_COLUMN].to_numpy(dtype=float),
            targets=frame[TARGET_COLUMN].to_numpy(dtype=float),
            titles=titles,
        )
