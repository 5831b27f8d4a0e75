"""
Train-and-evaluate runs: hold-out test split, k-fold cross-validation and
feature-group ablation.

Preprocessing is always fitted inside a run from its training indices only;
callers never pass fitted state across the train/test boundary.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from tqdm import tqdm

from ..config import ABLATION_CONDITIONS, NetworkConfig, RunConfig
from ..errors import ContractViolation, MovieSuccessError
from ..models import FeatureGroup, FeatureSchema
from ..network import Batch, NetworkParams, TrainReport, predict, train
from ..preprocessing.dataset import FilmTable, PreparedSplit, prepare_matrices
from .metrics import CLASSIFICATION_METRICS, REGRESSION_METRICS, EvalReport, classification_metrics, regression_metrics
from .splits import stratified_kfold, stratified_split

logger = logging.getLogger(__name__)

T = TypeVar("T")
CI_Z = 1.959963984540054


@dataclass(frozen=True)
class AblationSpec:
    """A feature-group removal and the input width it must produce."""
    label: str
    removed_groups: FrozenSet[FeatureGroup]
    expected_feature_count: int

    def __post_init__(self):
        if FeatureGroup.BASE in self.removed_groups:
            raise ContractViolation("ablations may remove SIR, Sentiment or Events only")

    @classmethod
    def from_groups(cls, label: str, groups: Iterable[str], expected: int) -> "AblationSpec":
        return cls(label, frozenset(FeatureGroup.parse(g) for g in groups), expected)


def default_ablation_specs(labels: Optional[Sequence[str]] = None) -> List[AblationSpec]:
    """
    The seven standard conditions, optionally restricted to ``labels``.

    Raises:
        ContractViolation: On an unknown label
    """
    specs = [AblationSpec.from_groups(*condition) for condition in ABLATION_CONDITIONS]
    if labels is None:
        return specs
    by_label = {s.label.lower(): s for s in specs}
    unknown = [label for label in labels if label.lower() not in by_label]
    if unknown:
        raise ContractViolation("unknown ablation condition", {"unknown": unknown, "known": list(by_label)})
    return [by_label[label.lower()] for label in labels]


@dataclass
class RunResult:
    """Outcome of training on one set of indices and evaluating on another."""
    report: EvalReport
    params: NetworkParams
    train_report: TrainReport
    prepared: PreparedSplit
    seed: int


@dataclass
class CVSummary:
    """Per-fold reports with mean, sample standard deviation and 95% interval."""
    folds: List[EvalReport]
    mean: Dict[str, Optional[float]] = field(default_factory=dict)
    std: Dict[str, Optional[float]] = field(default_factory=dict)
    ci_low: Dict[str, Optional[float]] = field(default_factory=dict)
    ci_high: Dict[str, Optional[float]] = field(default_factory=dict)


@dataclass
class AblationRow:
    spec: AblationSpec
    num_features: int
    report: EvalReport


def evaluate_params(params: NetworkParams, batch: Batch, threshold: float = 0.5) -> EvalReport:
    """Classification and regression metrics of trained parameters on ``batch``."""
    prediction = predict(batch.x, params, threshold)
    clf = classification_metrics(prediction.probability, batch.labels, threshold)
    reg = regression_metrics(prediction.revenue_scaled, batch.targets)
    return clf.merge(reg)


def _batch(matrix) -> Batch:
    return Batch.from_arrays(matrix.values, matrix.labels, matrix.targets)


def fit_and_evaluate(
    table: FilmTable,
    train_idx,
    test_idx,
    config: RunConfig,
    mask: Iterable[FeatureGroup] = (),
    seed: Optional[int] = None,
    schema: Optional[FeatureSchema] = None,
    progress: bool = False,
) -> RunResult:
    """
    Fit preprocessing on ``train_idx``, hold out a stratified validation
    share of it for early stopping, train, and evaluate on ``test_idx``.

    Args:
        table: Raw per-film table
        train_idx: Rows available for fitting and training
        test_idx: Rows only used for the returned report
        config: Run settings (validation share, network, features)
        mask: Feature groups to drop
        seed: Seed of this run; the config's root seed when omitted
        schema: Feature layout
        progress: Show the epoch progress bar
    """
    seed = config.seed if seed is None else seed
    train_idx = np.asarray(train_idx, dtype=int)
    prepared = prepare_matrices(table, train_idx, test_idx, mask, schema, config.features)

    inner = stratified_split(prepared.train.labels, ratio=1.0 - config.validation_ratio, seed=seed)
    fit_set = _batch(prepared.train.subset(inner.train))
    val_set = _batch(prepared.train.subset(inner.test))

    network: NetworkConfig = replace(config.network, seed=seed)
    params, train_report = train(fit_set, val_set, network, progress=progress)
    report = evaluate_params(params, _batch(prepared.test))
    return RunResult(report=report, params=params, train_report=train_report, prepared=prepared, seed=seed)


def holdout_split(table: FilmTable, config: RunConfig):
    """The run's stratified train/test split."""
    return stratified_split(table.labels, ratio=1.0 - config.test_ratio, seed=config.seed)


def evaluate_holdout(
    table: FilmTable,
    config: RunConfig,
    mask: Iterable[FeatureGroup] = (),
    schema: Optional[FeatureSchema] = None,
    progress: bool = False,
) -> RunResult:
    plan = holdout_split(table, config)
    return fit_and_evaluate(table, plan.train, plan.test, config, mask, schema=schema, progress=progress)


def _run_ordered(func: Callable[[int], T], count: int, n_jobs: int, desc: str, progress: bool) -> List[T]:
    """Run ``func(0..count-1)``, possibly in threads, returning results in index order."""
    if n_jobs <= 1:
        return [func(i) for i in tqdm(range(count), desc=desc, disable=not progress)]
    with ThreadPoolExecutor(max_workers=n_jobs) as executor:
        return list(tqdm(executor.map(func, range(count)), total=count, desc=desc, disable=not progress))


def summarize_folds(reports: Sequence[EvalReport]) -> CVSummary:
    """
    Mean, sample standard deviation and normal-approximation 95% interval of
    every metric over the folds where it is defined.
    """
    summary = CVSummary(folds=list(reports))
    for name in CLASSIFICATION_METRICS + REGRESSION_METRICS:
        values = np.array([r.get(name) for r in reports if r.get(name) is not None], dtype=float)
        if values.size == 0:
            for target in (summary.mean, summary.std, summary.ci_low, summary.ci_high):
                target[name] = None
            continue
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        half = CI_Z * std / math.sqrt(values.size)
        summary.mean[name] = mean
        summary.std[name] = std
        summary.ci_low[name] = mean - half
        summary.ci_high[name] = mean + half
    return summary


def cross_validate(
    table: FilmTable,
    config: RunConfig,
    mask: Iterable[FeatureGroup] = (),
    k: Optional[int] = None,
    schema: Optional[FeatureSchema] = None,
    progress: bool = False,
) -> CVSummary:
    """
    Stratified k-fold cross-validation; fold i trains with seed ``seed ^ i``.

    Folds run in up to ``config.n_jobs`` threads and are merged in fold order.
    """
    k = k or config.cv_folds
    plan = stratified_kfold(table.labels, k=k, seed=config.seed)
    mask = frozenset(mask)

    def run_fold(fold: int) -> EvalReport:
        train_idx, test_idx = plan.fold(fold)
        result = fit_and_evaluate(table, train_idx, test_idx, config, mask, seed=config.seed ^ fold, schema=schema)
        logger.info("Fold %d/%d: accuracy %.4f", fold + 1, k, result.report.accuracy)
        return result.report

    reports = _run_ordered(run_fold, k, config.n_jobs, "Folds", progress)
    return summarize_folds(reports)


def run_ablation(
    table: FilmTable,
    specs: Sequence[AblationSpec],
    config: RunConfig,
    schema: Optional[FeatureSchema] = None,
    progress: bool = False,
) -> List[AblationRow]:
    """
    Train one model per ablation condition on the same seeded hold-out split.

    Raises:
        ContractViolation: If a condition's feature count differs from its
            expected count
        MovieSuccessError: Any training error, annotated with the condition
    """
    plan = holdout_split(table, config)

    def run_spec(i: int) -> AblationRow:
        spec = specs[i]
        try:
            result = fit_and_evaluate(table, plan.train, plan.test, config, spec.removed_groups, schema=schema)
        except MovieSuccessError as exc:
            exc.details["ablation"] = spec.label
            raise
        width = result.prepared.train.width
        if width != spec.expected_feature_count:
            raise ContractViolation(
                f"{spec.label} produced {width} features",
                {"ablation": spec.label, "expected": spec.expected_feature_count, "got": width},
            )
        logger.info("%s: %d features, accuracy %.4f", spec.label, width, result.report.accuracy)
        return AblationRow(spec=spec, num_features=width, report=result.report)

    return _run_ordered(run_spec, len(specs), config.n_jobs, "Ablations", progress)


def ablation_widths(specs: Sequence[AblationSpec], schema: Optional[FeatureSchema] = None) -> List[Tuple[str, int]]:
    """Feature count each condition yields under ``schema``, without training."""
    schema = schema or FeatureSchema.default()
    return [(s.label, len(schema.masked(s.removed_groups))) for s in specs]
