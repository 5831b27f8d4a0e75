"""
Feature engineering for the model input table.

- power: Yeo-Johnson transform, its inverse and maximum-likelihood fit
- winsorize: quantile clipping
- pca: principal components of the SIR parameters
- labels: ROI, success label, event indicator and budget imputation
- metadata: base-group columns from movie metadata
- assembler: schema-ordered feature vectors, target scaling, feature matrices
"""

from .power import fit_yeo_johnson, yeo_johnson, yeo_johnson_inverse, yeo_johnson_llf
from .winsorize import WinsorBounds, fit_winsor_bounds, winsorize
from .pca import pca_fit, pca_project, pca_reconstruct
from .labels import (
    SUCCESS_ROI,
    BudgetImputer,
    compute_label,
    compute_roi,
    event_indicator,
)
from .metadata import CategoryVocabulary, base_columns, director_prior_films, month_cycle
from .assembler import FeatureMatrix, TargetScaler, assemble

__all__ = [
    "fit_yeo_johnson",
    "yeo_johnson",
    "yeo_johnson_inverse",
    "yeo_johnson_llf",
    "WinsorBounds",
    "fit_winsor_bounds",
    "winsorize",
    "pca_fit",
    "pca_project",
    "pca_reconstruct",
    "SUCCESS_ROI",
    "BudgetImputer",
    "compute_label",
    "compute_roi",
    "event_indicator",
    "CategoryVocabulary",
    "base_columns",
    "director_prior_films",
    "month_cycle",
    "FeatureMatrix",
    "TargetScaler",
    "assemble",
]
