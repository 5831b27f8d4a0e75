"""
Classification and regression metrics.

Metrics whose denominator is zero are reported as None and named in
``EvalReport.undefined``; they are never coerced to 0.
"""

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import rankdata

from ..errors import ContractViolation

CLASSIFICATION_METRICS = ("accuracy", "precision", "recall", "f1", "roc_auc")
REGRESSION_METRICS = ("mae", "mse", "rmse", "r2", "mape")
MAPE_MIN_TARGET = 1e-8


@dataclass(frozen=True)
class EvalReport:
    """
    Metric bundle for one split, fold or ablation condition.

    Fields of the task that was not evaluated stay None without being
    listed as undefined.
    """
    n: int
    accuracy: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f1: Optional[float] = None
    roc_auc: Optional[float] = None
    mae: Optional[float] = None
    mse: Optional[float] = None
    rmse: Optional[float] = None
    r2: Optional[float] = None
    mape: Optional[float] = None
    mape_skipped: int = 0
    undefined: Tuple[str, ...] = field(default=())

    def merge(self, other: "EvalReport") -> "EvalReport":
        """Combine a classification and a regression report of the same rows."""
        if self.n != other.n:
            raise ContractViolation("cannot merge reports over different row counts", {"n": [self.n, other.n]})
        values = {}
        for f in fields(self):
            if f.name in CLASSIFICATION_METRICS + REGRESSION_METRICS:
                mine, theirs = getattr(self, f.name), getattr(other, f.name)
                values[f.name] = mine if mine is not None else theirs
        return replace(
            self,
            **values,
            mape_skipped=self.mape_skipped + other.mape_skipped,
            undefined=tuple(sorted(set(self.undefined) | set(other.undefined))),
        )

    def get(self, name: str) -> Optional[float]:
        return getattr(self, name)

    def to_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["undefined"] = list(self.undefined)
        return data


def _check_lengths(a: np.ndarray, b: np.ndarray, minimum: int):
    if a.shape != b.shape or a.ndim != 1:
        raise ContractViolation("metric inputs must be 1-D and of equal length",
                                {"shapes": [list(a.shape), list(b.shape)]})
    if a.size < minimum:
        raise ContractViolation(f"metric inputs need at least {minimum} rows", {"n": int(a.size)})


def _ratio(numerator: float, denominator: float) -> Optional[float]:
    return numerator / denominator if denominator else None


def roc_auc(scores, labels) -> Optional[float]:
    """
    Area under the ROC curve from the Mann-Whitney rank statistic, with ties
    counted as one half. None when only one class is present.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(int)
    positives = labels == 1
    n_pos = int(positives.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores, method="average")
    u = float(ranks[positives].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def classification_metrics(probs, labels, threshold: float = 0.5) -> EvalReport:
    """
    Confusion-matrix metrics at ``threshold`` (p >= threshold is positive)
    plus ROC AUC.

    Raises:
        ContractViolation: Mismatched lengths, no rows, or labels outside {0, 1}
    """
    probs = np.asarray(probs, dtype=float).reshape(-1)
    labels = np.asarray(labels, dtype=float).reshape(-1)
    _check_lengths(probs, labels, 1)
    if not np.all((labels == 0) | (labels == 1)):
        raise ContractViolation("labels must be 0 or 1")

    predicted = probs >= threshold
    actual = labels == 1
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    tn = int(np.sum(~predicted & ~actual))

    accuracy = (tp + tn) / labels.size
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    auc = roc_auc(probs, labels)

    values = {"precision": precision, "recall": recall, "f1": f1, "roc_auc": auc}
    undefined = tuple(name for name, value in values.items() if value is None)
    return EvalReport(n=int(labels.size), accuracy=accuracy, undefined=undefined, **values)


def regression_metrics(preds, targets) -> EvalReport:
    """
    MAE, MSE, RMSE, R^2 and MAPE.

    MAPE skips targets with magnitude below 1e-8 and records the skip count;
    R^2 is undefined for constant targets.

    Raises:
        ContractViolation: Mismatched lengths or fewer than two rows
    """
    preds = np.asarray(preds, dtype=float).reshape(-1)
    targets = np.asarray(targets, dtype=float).reshape(-1)
    _check_lengths(preds, targets, 2)

    errors = preds - targets
    mae = float(np.mean(np.abs(errors)))
    mse = float(np.mean(errors ** 2))
    rmse = math.sqrt(mse)

    ss_res = float(np.sum(errors ** 2))
    ss_tot = float(np.sum((targets - targets.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else None

    usable = np.abs(targets) >= MAPE_MIN_TARGET
    skipped = int(np.sum(~usable))
    mape = float(np.mean(np.abs(errors[usable]) / np.abs(targets[usable]))) if usable.any() else None

    undefined: List[str] = [name for name, value in (("r2", r2), ("mape", mape)) if value is None]
    return EvalReport(
        n=int(targets.size),
        mae=mae,
        mse=mse,
        rmse=rmse,
        r2=r2,
        mape=mape,
        mape_skipped=skipped,
        undefined=tuple(undefined),
    )
