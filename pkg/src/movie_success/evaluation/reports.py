"""
Report tables written as CSV and as aligned plain text.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .harness import AblationRow, CVSummary
from .metrics import CLASSIFICATION_METRICS, REGRESSION_METRICS, EvalReport

METRIC_HEADERS = {
    "accuracy": "Accuracy",
    "precision": "Precision",
    "recall": "Recall",
    "f1": "F1 Score",
    "roc_auc": "ROC AUC",
    "mae": "MAE",
    "mse": "MSE",
    "rmse": "RMSE",
    "r2": "R2",
    "mape": "MAPE",
}
ABLATION_COLUMNS = ["Removed Components", "Num Features", "Accuracy", "F1 Score", "MAE", "RMSE"]


def metrics_frame(reports: Sequence[Tuple[str, EvalReport]]) -> pd.DataFrame:
    """One row per labelled report with every metric column; undefined values stay empty."""
    rows = []
    for label, report in reports:
        row: Dict[str, object] = {"Model": label, "N": report.n}
        for name in CLASSIFICATION_METRICS + REGRESSION_METRICS:
            row[METRIC_HEADERS[name]] = report.get(name)
        row["Undefined"] = ";".join(report.undefined)
        rows.append(row)
    return pd.DataFrame(rows)


def cv_frame(summary: CVSummary) -> pd.DataFrame:
    """Per-fold rows followed by mean, std and interval rows."""
    frame = metrics_frame([(f"fold {i + 1}", r) for i, r in enumerate(summary.folds)])
    extra = []
    for label, values in (
        ("mean", summary.mean),
        ("std", summary.std),
        ("ci95_low", summary.ci_low),
        ("ci95_high", summary.ci_high),
    ):
        row: Dict[str, object] = {"Model": label, "N": None, "Undefined": ""}
        for name in CLASSIFICATION_METRICS + REGRESSION_METRICS:
            row[METRIC_HEADERS[name]] = values.get(name)
        extra.append(row)
    return pd.concat([frame, pd.DataFrame(extra)], ignore_index=True)


def ablation_frame(rows: Sequence[AblationRow]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "Removed Components": row.spec.label,
                "Num Features": row.num_features,
                "Accuracy": row.report.accuracy,
                "F1 Score": row.report.f1,
                "MAE": row.report.mae,
                "RMSE": row.report.rmse,
            }
            for row in rows
        ],
        columns=ABLATION_COLUMNS,
    )


def format_table(frame: pd.DataFrame, digits: int = 4) -> str:
    """Aligned plain-text rendering; undefined values print as "n/a"."""
    return frame.to_string(index=False, na_rep="n/a", float_format=lambda v: f"{v:.{digits}f}")


def write_report(frame: pd.DataFrame, csv_path, text_path: Optional[Path] = None) -> List[Path]:
    """
    Save a report as CSV and, optionally, as a plain-text table.

    Returns:
        The written paths
    """
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(csv_path, index=False, float_format="%.10g")
    written = [csv_path]
    if text_path is not None:
        text_path = Path(text_path)
        text_path.write_text(format_table(frame) + "\n", encoding="utf-8")
        written.append(text_path)
    return written
