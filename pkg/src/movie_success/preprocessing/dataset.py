"""
Per-film raw feature table and its train-only conversion into model inputs.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from ..config import FeatureConfig
from ..errors import ContractViolation, EmptyDataset
from ..features.assembler import FeatureMatrix, TargetScaler, assemble
from ..models import FeatureGroup, FeatureSchema
from .table import FeaturePreprocessor

logger = logging.getLogger(__name__)


@dataclass
class FilmTable:
    """
    One row per film before any fitted preprocessing.

    Attributes:
        raw: Numeric schema columns (NaN where undefined), PCA inputs and the
            raw ``language``/``country`` strings
        labels: Success label per film
        opening_weekend: Opening-weekend revenue per film, in currency units
        titles: Film titles, aligned with the rows
    """
    raw: pd.DataFrame
    labels: np.ndarray
    opening_weekend: np.ndarray
    titles: Tuple[str, ...]

    def __post_init__(self):
        n = len(self.raw)
        if not (self.labels.shape[0] == self.opening_weekend.shape[0] == len(self.titles) == n):
            raise ContractViolation("film table columns differ in length")
        self.raw = self.raw.reset_index(drop=True)

    def __len__(self) -> int:
        return len(self.raw)

    @property
    def positive_share(self) -> float:
        return float(np.mean(self.labels)) if len(self) else float("nan")


@dataclass
class PreparedSplit:
    """Model-ready matrices of a split and the state fitted on its training rows."""
    train: FeatureMatrix
    test: FeatureMatrix
    preprocessor: FeaturePreprocessor
    target_scaler: TargetScaler


def _matrix(
    processed: pd.DataFrame,
    labels: np.ndarray,
    targets: np.ndarray,
    titles: Tuple[str, ...],
    mask: frozenset,
    schema: FeatureSchema,
    pca_names,
) -> FeatureMatrix:
    vectors = []
    for pos, row in enumerate(processed.to_dict(orient="records")):
        vectors.append(
            assemble(
                columns=row,
                pca_scores=[row[name] for name in pca_names],
                event=row.get("event_indicator", 0.0),
                label=int(labels[pos]),
                target_scaled=float(targets[pos]),
                mask=mask,
                schema=schema,
            )
        )
    return FeatureMatrix.from_vectors(vectors, titles)


def prepare_matrices(
    table: FilmTable,
    train_idx,
    test_idx,
    mask: Iterable[FeatureGroup] = (),
    schema: Optional[FeatureSchema] = None,
    config: Optional[FeatureConfig] = None,
) -> PreparedSplit:
    """
    Fit preprocessing and target scaling on ``train_idx`` only, then build
    the feature matrices of both index sets.

    Args:
        table: Raw per-film table
        train_idx: Rows used for every fitted statistic
        test_idx: Rows only transformed with the fitted statistics
        mask: Feature groups to drop
        schema: Feature layout; the packaged schema when omitted
        config: Winsorization and PCA settings

    Returns:
        PreparedSplit with both matrices and the fitted state
    """
    schema = schema or FeatureSchema.default()
    train_idx = np.asarray(train_idx, dtype=int)
    test_idx = np.asarray(test_idx, dtype=int)
    if train_idx.size == 0:
        raise EmptyDataset("no training rows to fit preprocessing on")
    if np.intersect1d(train_idx, test_idx).size:
        raise ContractViolation("training and test rows overlap")

    drop = frozenset(mask)
    preprocessor = FeaturePreprocessor(schema, config).fit(table.raw.iloc[train_idx])
    scaler = TargetScaler().fit(table.opening_weekend[train_idx])

    def build(idx: np.ndarray) -> FeatureMatrix:
        processed = preprocessor.transform(table.raw.iloc[idx])
        return _matrix(
            processed,
            table.labels[idx],
            scaler.transform(table.opening_weekend[idx]),
            tuple(table.titles[i] for i in idx),
            drop,
            schema,
            preprocessor.pca_names,
        )

    train = build(train_idx)
    test = build(test_idx) if test_idx.size else _empty_like(train)
    logger.debug("Prepared %d training and %d test rows with %d features", len(train), len(test), train.width)
    return PreparedSplit(train=train, test=test, preprocessor=preprocessor, target_scaler=scaler)


def _empty_like(matrix: FeatureMatrix) -> FeatureMatrix:
    return FeatureMatrix(
        values=np.empty((0, matrix.width)),
        names=matrix.names,
        labels=np.empty(0),
        targets=np.empty(0),
        dropped_groups=matrix.dropped_groups,
    )
