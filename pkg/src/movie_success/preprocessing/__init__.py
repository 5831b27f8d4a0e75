"""
Train-only fitting of column preprocessing.

Steps can be chained into a StepPipeline; FeaturePreprocessor fits one
pipeline per schema column plus the SIR PCA on training rows:
- MedianImputer fills undefined values
- Winsorizer clips outliers at training quantiles
- YeoJohnsonStep reduces skew
- Standardizer z-scores

prepare_matrices turns a FilmTable into model-ready matrices for a split.
"""

from .base import BaseStep, StepPipeline
from .steps import MedianImputer, Standardizer, Winsorizer, YeoJohnsonStep, column_pipeline
from .table import FeaturePreprocessor
from .dataset import FilmTable, PreparedSplit, prepare_matrices

__all__ = [
    "BaseStep",
    "StepPipeline",
    "MedianImputer",
    "Standardizer",
    "Winsorizer",
    "YeoJohnsonStep",
    "column_pipeline",
    "FeaturePreprocessor",
    "FilmTable",
    "PreparedSplit",
    "prepare_matrices",
]
