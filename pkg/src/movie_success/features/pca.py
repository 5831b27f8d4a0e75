"""
Principal components of standardized columns.
"""

import logging

import numpy as np

from ..errors import ContractViolation, RankDeficient
from ..models import PCAModel

logger = logging.getLogger(__name__)


def pca_fit(matrix, k: int = 2, strict: bool = True) -> PCAModel:
    """
    Fit the top-``k`` principal components of ``matrix`` (n rows, d columns).

    Columns are standardized with their sample standard deviation before the
    covariance is decomposed; zero-variance columns keep unit scale. Each
    component is signed so its largest-magnitude loading is positive.

    Args:
        matrix: n x d data, finite
        k: Number of components, 1 <= k <= d
        strict: Raise when fewer than k eigenvalues are positive; otherwise
            keep the trailing zero-variance directions with a warning

    Raises:
        ContractViolation: Bad shape or non-finite values
        RankDeficient: Covariance rank below k while ``strict``
    """
    data = np.asarray(matrix, dtype=float)
    if data.ndim != 2:
        raise ContractViolation("pca_fit expects a 2-D matrix")
    n, d = data.shape
    if not (1 <= k <= d) or n < 2:
        raise ContractViolation("pca_fit needs n >= 2 and 1 <= k <= d", {"n": n, "d": d, "k": k})
    if not np.all(np.isfinite(data)):
        raise ContractViolation("pca_fit needs finite values")
    if n <= d:
        logger.warning("PCA fitted on %d rows for %d columns; covariance is singular", n, d)

    mean = data.mean(axis=0)
    scale = data.std(axis=0, ddof=1)
    scale = np.where(scale > 0, scale, 1.0)
    standardized = (data - mean) / scale
    cov = standardized.T @ standardized / (n - 1)

    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    tol = max(n, d) * np.finfo(float).eps * max(abs(eigvals[0]), 1.0)
    positive = int(np.sum(eigvals > tol))
    if positive < k:
        details = {"positive_eigenvalues": positive, "k": k}
        if strict:
            raise RankDeficient("covariance has fewer positive eigenvalues than components", details)
        logger.warning("PCA rank %d below k=%d; trailing components carry no variance", positive, k)

    eigvals = np.clip(eigvals, 0.0, None)
    total = eigvals.sum()
    ratios = eigvals[:k] / total if total > 0 else np.zeros(k)

    components = eigvecs[:, :k].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0

    return PCAModel(
        mean=mean,
        scale=scale,
        components=components,
        explained_variance_ratio=np.clip(ratios, 0.0, 1.0),
    )


def pca_project(model: PCAModel, row) -> np.ndarray:
    """Scores of one row (d,) or many rows (n, d)."""
    data = np.asarray(row, dtype=float)
    if data.shape[-1] != model.n_features:
        raise ContractViolation(
            "row width does not match the PCA model", {"expected": model.n_features, "got": data.shape[-1]}
        )
    return ((data - model.mean) / model.scale) @ model.components.T


def pca_reconstruct(model: PCAModel, scores) -> np.ndarray:
    """Map scores back to the input space; exact when k = d."""
    scores = np.asarray(scores, dtype=float)
    return (scores @ model.components) * model.scale + model.mean
