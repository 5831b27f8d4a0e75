"""
Evaluation of trained networks.

- metrics: classification and regression metrics with explicit undefined values
- splits: stratified hold-out and k-fold plans
- harness: train/evaluate runs, cross-validation and feature-group ablation
- reports: CSV and plain-text report tables
"""

from .metrics import EvalReport, classification_metrics, regression_metrics, roc_auc
from .splits import SplitPlan, stratified_kfold, stratified_split
from .harness import (
    AblationRow,
    AblationSpec,
    CVSummary,
    RunResult,
    ablation_widths,
    cross_validate,
    default_ablation_specs,
    evaluate_holdout,
    evaluate_params,
    fit_and_evaluate,
    holdout_split,
    run_ablation,
    summarize_folds,
)
from .reports import ablation_frame, cv_frame, format_table, metrics_frame, write_report

__all__ = [
    "EvalReport",
    "classification_metrics",
    "regression_metrics",
    "roc_auc",
    "SplitPlan",
    "stratified_kfold",
    "stratified_split",
    "AblationRow",
    "AblationSpec",
    "CVSummary",
    "RunResult",
    "ablation_widths",
    "cross_validate",
    "default_ablation_specs",
    "evaluate_holdout",
    "evaluate_params",
    "fit_and_evaluate",
    "holdout_split",
    "run_ablation",
    "summarize_folds",
    "ablation_frame",
    "cv_frame",
    "format_table",
    "metrics_frame",
    "write_report",
]
