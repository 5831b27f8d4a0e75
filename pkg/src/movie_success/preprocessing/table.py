"""
Fits the per-column pipelines, category vocabularies and SIR PCA on training
rows and applies them to any rows of the raw feature table.
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..config import FeatureConfig
from ..errors import ContractViolation, EmptyDataset
from ..features.metadata import CategoryVocabulary
from ..features.pca import pca_fit, pca_project
from ..models import FeatureSchema, PCAModel
from .base import StepPipeline
from .steps import column_pipeline

logger = logging.getLogger(__name__)

# Raw categorical column -> prefix of its one-hot slots in the schema.
CATEGORICAL_COLUMNS = {"language": "language", "country": "country"}
PCA_TRANSFORM = "pca"


class FeaturePreprocessor:
    """
    Column-wise preprocessing of the raw per-film feature table.

    The raw table holds one row per film with every numeric schema column
    (NaN where undefined), the PCA input columns and the raw ``language`` and
    ``country`` strings. ``fit`` must only ever see training rows; ``transform``
    reads fitted state and never changes it.

    Example:
        pre = FeaturePreprocessor()
        pre.fit(raw.iloc[train_idx])
        processed = pre.transform(raw)     # columns in schema order
    """

    def __init__(self, schema: Optional[FeatureSchema] = None, config: Optional[FeatureConfig] = None):
        self.schema = schema or FeatureSchema.default()
        self.config = config or FeatureConfig()
        self.columns: Dict[str, StepPipeline] = {}
        self.pca_columns: Dict[str, StepPipeline] = {}
        self.vocabularies: Dict[str, CategoryVocabulary] = {}
        self.pca_model: Optional[PCAModel] = None
        self._slots = self._onehot_slots()

    def _onehot_slots(self) -> Dict[str, int]:
        slots = {}
        for raw, prefix in CATEGORICAL_COLUMNS.items():
            names = [n for n in self.schema.names if n.startswith(f"{prefix}_")]
            if names:
                slots[raw] = len(names) - 1
        return slots

    def _is_onehot(self, name: str) -> bool:
        return any(name.startswith(f"{prefix}_") for prefix in CATEGORICAL_COLUMNS.values())

    @property
    def numeric_columns(self) -> List[str]:
        return [
            e.name for e in self.schema.entries
            if e.transform != PCA_TRANSFORM and not self._is_onehot(e.name)
        ]

    @property
    def pca_names(self) -> List[str]:
        return [e.name for e in self.schema.entries if e.transform == PCA_TRANSFORM]

    @property
    def is_fitted(self) -> bool:
        return bool(self.columns)

    def _require(self, frame: pd.DataFrame, names: List[str]):
        missing = [n for n in names if n not in frame.columns]
        if missing:
            raise ContractViolation("raw feature table lacks columns", {"missing": missing})

    def fit(self, frame: pd.DataFrame) -> "FeaturePreprocessor":
        """
        Fit every statistic on training rows.

        Args:
            frame: Raw feature table restricted to training rows

        Returns:
            Self for method chaining
        """
        if len(frame) == 0:
            raise EmptyDataset("cannot fit preprocessing on zero training rows")
        self._require(frame, self.numeric_columns + list(self.schema.pca_inputs))

        cfg = self.config
        self.columns = {}
        for name in self.numeric_columns:
            pipeline = column_pipeline(self.schema.transform_of(name), cfg.winsor_low, cfg.winsor_high)
            pipeline.fit(frame[name].to_numpy(dtype=float), {"column": name})
            self.columns[name] = pipeline

        if self.pca_names:
            self.pca_columns = {}
            stacked = []
            for name in self.schema.pca_inputs:
                pipeline = column_pipeline(self.schema.pca_transform, cfg.winsor_low, cfg.winsor_high)
                stacked.append(pipeline.fit_transform(frame[name].to_numpy(dtype=float), {"column": name}))
                self.pca_columns[name] = pipeline
            k = min(cfg.pca_components, len(self.pca_names))
            self.pca_model = pca_fit(np.column_stack(stacked), k=k, strict=False)
            logger.info(
                "SIR PCA explained variance: %s",
                ", ".join(f"{r:.3f}" for r in self.pca_model.explained_variance_ratio),
            )

        self.vocabularies = {}
        for raw, top_k in self._slots.items():
            observed = frame[raw].astype(str).tolist() if raw in frame.columns else []
            self.vocabularies[raw] = CategoryVocabulary.fit(observed, top_k=top_k)

        logger.debug("Preprocessing fitted on %d rows", len(frame))
        return self

    def transform(self, frame: pd.DataFrame) -> pd.DataFrame:
        """Processed table with one column per schema entry, in schema order."""
        if not self.is_fitted:
            raise ContractViolation("FeaturePreprocessor used before fit")
        self._require(frame, self.numeric_columns + list(self.schema.pca_inputs))

        out: Dict[str, np.ndarray] = {}
        for name, pipeline in self.columns.items():
            out[name] = pipeline.transform(frame[name].to_numpy(dtype=float))

        if self.pca_model is not None:
            stacked = np.column_stack([
                self.pca_columns[name].transform(frame[name].to_numpy(dtype=float))
                for name in self.schema.pca_inputs
            ])
            scores = pca_project(self.pca_model, stacked)
            for j, name in enumerate(self.pca_names):
                out[name] = scores[:, j] if j < scores.shape[1] else np.zeros(len(frame))

        for raw, top_k in self._slots.items():
            prefix = CATEGORICAL_COLUMNS[raw]
            values = frame[raw].astype(str).tolist() if raw in frame.columns else [""] * len(frame)
            encoded = np.array(
                [self.vocabularies[raw].encode_padded(v, top_k=top_k) for v in values], dtype=float
            ).reshape(len(frame), top_k + 1)
            names = [n for n in self.schema.names if n.startswith(f"{prefix}_")]
            for j, name in enumerate(names):
                out[name] = encoded[:, j]

        return pd.DataFrame({name: out[name] for name in self.schema.names}, index=frame.index)

    def fit_transform(self, frame: pd.DataFrame) -> pd.DataFrame:
        return self.fit(frame).transform(frame)

    def params(self) -> Dict[str, Any]:
        """Fitted statistics for provenance files."""
        return {
            "columns": {name: p.params() for name, p in self.columns.items()},
            "pca_inputs": {name: p.params() for name, p in self.pca_columns.items()},
            "pca": self.pca_model.to_dict() if self.pca_model is not None else None,
            "vocabularies": {raw: v.to_dict() for raw, v in self.vocabularies.items()},
        }

    def __repr__(self) -> str:
        return f"FeaturePreprocessor(columns={len(self.schema)}, fitted={self.is_fitted})"
