"""
Feature-engineering models: fitted transform parameters, PCA model, schema
and assembled feature vectors.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from ..errors import ContractViolation


class FeatureGroup(str, Enum):
    SIR = "SIR"
    SENTIMENT = "Sentiment"
    EVENTS = "Events"
    BASE = "Base"

    @classmethod
    def parse(cls, value: str) -> "FeatureGroup":
        for group in cls:
            if group.value.lower() == value.strip().lower():
                return group
        raise ContractViolation(f"unknown feature group {value!r}", {"known": [g.value for g in cls]})


EXPECTED_GROUP_SIZES = {
    FeatureGroup.SIR: 7,
    FeatureGroup.SENTIMENT: 5,
    FeatureGroup.EVENTS: 1,
    FeatureGroup.BASE: 16,
}


@dataclass(frozen=True)
class TransformParams:
    """Fitted Yeo-Johnson exponent for one column."""
    lambda_yj: float
    fitted_on: str = ""

    def __post_init__(self):
        if not math.isfinite(self.lambda_yj):
            raise ContractViolation("lambda_yj must be finite", {"column": self.fitted_on})

    def to_dict(self) -> Dict[str, Any]:
        return {"lambda_yj": self.lambda_yj, "fitted_on": self.fitted_on}


@dataclass(frozen=True)
class PCAModel:
    """
    Principal components of standardized inputs.

    Attributes:
        mean: Column means of the fitting matrix
        scale: Column standard deviations used for standardization
        components: (k, d) orthonormal rows, largest-magnitude loading positive
        explained_variance_ratio: k nonincreasing ratios
    """
    mean: np.ndarray
    scale: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.components.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.components.shape[1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "components": self.components.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
        }


@dataclass(frozen=True)
class FeatureSpec:
    """One schema entry."""
    name: str
    group: FeatureGroup
    transform: str = "standard"


@dataclass(frozen=True)
class FeatureSchema:
    """
    Ordered, group-tagged model input layout.

    ``pca_inputs`` names the auxiliary SIR columns compressed into pc1/pc2.
    """
    entries: Tuple[FeatureSpec, ...]
    pca_inputs: Tuple[str, ...] = ()
    pca_transform: str = "yeo_johnson"

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ContractViolation("feature names must be unique")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> List[str]:
        return [e.name for e in self.entries]

    def group_sizes(self) -> Dict[FeatureGroup, int]:
        sizes = {g: 0 for g in FeatureGroup}
        for entry in self.entries:
            sizes[entry.group] += 1
        return sizes

    def names_in(self, group: FeatureGroup) -> List[str]:
        return [e.name for e in self.entries if e.group == group]

    def transform_of(self, name: str) -> str:
        for entry in self.entries:
            if entry.name == name:
                return entry.transform
        raise KeyError(name)

    def masked(self, drop: Iterable[FeatureGroup] = ()) -> "FeatureSchema":
        """Schema with every entry of the dropped groups removed."""
        drop = frozenset(drop)
        kept = tuple(e for e in self.entries if e.group not in drop)
        if not kept:
            raise ContractViolation("mask removes every feature group")
        return FeatureSchema(kept, self.pca_inputs, self.pca_transform)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "features": [
                {"name": e.name, "group": e.group.value, "transform": e.transform}
                for e in self.entries
            ],
            "pca": {"inputs": list(self.pca_inputs), "transform": self.pca_transform},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FeatureSchema":
        entries = tuple(
            FeatureSpec(e["name"], FeatureGroup.parse(e["group"]), e.get("transform", "standard"))
            for e in data["features"]
        )
        pca = data.get("pca", {})
        return cls(entries, tuple(pca.get("inputs", ())), pca.get("transform", "yeo_johnson"))

    @classmethod
    def default(cls) -> "FeatureSchema":
        """The packaged 29-feature schema."""
        text = resources.files("movie_success.data").joinpath("feature_schema.json").read_text("utf-8")
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class FeatureVector:
    """Model input row plus its two targets."""
    values: Tuple[float, ...]
    names: Tuple[str, ...]
    label_success: int
    target_revenue_scaled: float
    dropped_groups: FrozenSet[FeatureGroup] = field(default_factory=frozenset)

    def __post_init__(self):
        if len(self.values) != len(self.names):
            raise ContractViolation("feature values and names differ in length")
        if self.label_success not in (0, 1):
            raise ContractViolation("label_success must be 0 or 1")

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_array())))

    def get(self, name: str) -> Optional[float]:
        try:
            return self.values[self.names.index(name)]
        except ValueError:
            return None
