"""Tests for metrics, splits, the train/evaluate harness and report tables."""

import itertools

import numpy as np
import pandas as pd
import pytest
from sklearn.metrics import mean_absolute_error, r2_score, roc_auc_score

from movie_success.errors import ContractViolation, EmptyDataset, InsufficientClassMembers
from movie_success.evaluation import (
    AblationRow,
    AblationSpec,
    EvalReport,
    ablation_frame,
    ablation_widths,
    classification_metrics,
    cross_validate,
    default_ablation_specs,
    evaluate_holdout,
    format_table,
    holdout_split,
    metrics_frame,
    regression_metrics,
    roc_auc,
    run_ablation,
    stratified_kfold,
    stratified_split,
    summarize_folds,
    write_report,
)
from movie_success.models import FeatureGroup
from movie_success.preprocessing import FeaturePreprocessor
from movie_success.pipeline import build_film_table


def pairwise_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in itertools.product(pos, neg))
    return wins / (len(pos) * len(neg))


class TestClassificationMetrics:

    def test_perfect_predictions(self):
        report = classification_metrics([0.9, 0.2, 0.7, 0.1], [1, 0, 1, 0])
        assert (report.accuracy, report.f1, report.roc_auc) == (1.0, 1.0, 1.0)
        assert report.undefined == ()

    def test_confusion_matrix_arithmetic(self):
        # TP=2, FP=1, FN=1, TN=1
        report = classification_metrics([0.9, 0.8, 0.7, 0.2, 0.1], [1, 1, 0, 1, 0])
        assert report.precision == pytest.approx(2 / 3)
        assert report.recall == pytest.approx(2 / 3)
        assert report.f1 == pytest.approx(2 / 3)
        assert report.accuracy == pytest.approx(3 / 5)

    def test_threshold_is_inclusive(self):
        report = classification_metrics([0.5], [1])
        assert report.accuracy == 1.0

    def test_auc_counts_concordant_pairs(self):
        assert roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75

    def test_auc_matches_brute_force_with_ties(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 51))
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            scores = rng.integers(0, 5, size=n).astype(float)
            auc = roc_auc(scores, labels)
            assert auc == pytest.approx(pairwise_auc(scores, labels), abs=1e-12)
            assert auc == pytest.approx(roc_auc_score(labels, scores), abs=1e-12)

    def test_single_class_leaves_metrics_undefined(self):
        report = classification_metrics([0.2, 0.7], [0, 0])
        assert report.recall is None and report.roc_auc is None and report.f1 is None
        assert report.precision == 0.0
        assert set(report.undefined) == {"recall", "f1", "roc_auc"}

    def test_no_predicted_positives(self):
        report = classification_metrics([0.1, 0.2, 0.3], [1, 0, 1])
        assert report.precision is None
        assert report.recall == 0.0
        assert "precision" in report.undefined

    def test_metric_ranges(self, rng):
        probs = rng.random(200)
        labels = rng.integers(0, 2, size=200)
        report = classification_metrics(probs, labels)
        for name in ("accuracy", "precision", "recall", "f1", "roc_auc"):
            assert 0.0 <= report.get(name) <= 1.0

    @pytest.mark.parametrize(
        "probs,labels",
        [([0.1, 0.2], [1]), ([], []), ([0.3], [2])],
    )
    def test_rejects_bad_input(self, probs, labels):
        with pytest.raises(ContractViolation):
            classification_metrics(probs, labels)


class TestRegressionMetrics:

    def test_exact_predictions(self):
        report = regression_metrics([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert report.mae == 0.0 and report.r2 == 1.0

    def test_mean_predictor_has_zero_r2(self):
        targets = np.array([1.0, 4.0, 2.0, 9.0])
        assert regression_metrics(np.full(4, targets.mean()), targets).r2 == pytest.approx(0.0, abs=1e-12)

    def test_hand_arithmetic(self):
        report = regression_metrics([1.0, 2.0], [2.0, 4.0])
        assert report.mae == pytest.approx(1.5)
        assert report.mse == pytest.approx(2.5)
        assert report.rmse == pytest.approx(np.sqrt(2.5))
        assert report.mape == pytest.approx(0.5)
        assert report.r2 == pytest.approx(-1.5)

    def test_agrees_with_sklearn(self, rng):
        preds, targets = rng.standard_normal(50), rng.standard_normal(50)
        report = regression_metrics(preds, targets)
        assert report.mae == pytest.approx(mean_absolute_error(targets, preds))
        assert report.r2 == pytest.approx(r2_score(targets, preds))
        assert report.mae <= report.rmse
        assert report.r2 <= 1.0

    def test_constant_targets(self):
        report = regression_metrics([1.0, 2.0], [3.0, 3.0])
        assert report.r2 is None
        assert report.undefined == ("r2",)

    def test_mape_skips_zero_targets(self):
        report = regression_metrics([1.0, 1.0], [0.0, 2.0])
        assert report.mape_skipped == 1
        assert report.mape == pytest.approx(0.5)

    def test_needs_two_rows(self):
        with pytest.raises(ContractViolation):
            regression_metrics([1.0], [1.0])


class TestEvalReport:

    def test_merge_combines_tasks(self):
        merged = classification_metrics([0.2, 0.7], [0, 0]).merge(regression_metrics([1.0, 2.0], [3.0, 3.0]))
        assert merged.accuracy == 0.5
        assert merged.mae == pytest.approx(1.5)
        assert merged.undefined == ("f1", "r2", "recall", "roc_auc")

    def test_merge_requires_same_rows(self):
        with pytest.raises(ContractViolation):
            EvalReport(n=2).merge(EvalReport(n=3))

    def test_to_dict(self):
        data = classification_metrics([0.2, 0.7], [0, 0]).to_dict()
        assert data["roc_auc"] is None
        assert "roc_auc" in data["undefined"]


class TestSplits:

    def test_stratified_arithmetic(self):
        labels = np.array([1] * 30 + [0] * 70)
        plan = stratified_split(labels, ratio=0.8, seed=1)
        assert int(labels[plan.train].sum()) == 24
        assert int((labels[plan.train] == 0).sum()) == 56
        assert len(plan.test) == 20

    def test_split_partitions_rows(self, rng):
        labels = rng.integers(0, 2, size=57)
        plan = stratified_split(labels, seed=4)
        assert not set(plan.train) & set(plan.test)
        assert sorted(np.concatenate([plan.train, plan.test])) == list(range(57))

    def test_split_is_deterministic(self, rng):
        labels = rng.integers(0, 2, size=40)
        first, second = stratified_split(labels, seed=9), stratified_split(labels, seed=9)
        np.testing.assert_array_equal(first.train, second.train)
        np.testing.assert_array_equal(first.test, second.test)

    def test_small_class_keeps_one_row_each_side(self):
        labels = np.array([1, 1] + [0] * 20)
        plan = stratified_split(labels, ratio=0.9, seed=0)
        assert int(labels[plan.test].sum()) == 1

    @pytest.mark.parametrize("ratio", [0.0, 1.0, 1.5])
    def test_bad_ratio(self, ratio):
        with pytest.raises(ContractViolation):
            stratified_split([0, 1, 0, 1], ratio=ratio)

    def test_zero_rows(self):
        with pytest.raises(EmptyDataset):
            stratified_split([])

    def test_kfold_balances_classes(self):
        labels = np.array([0, 1] * 50)
        plan = stratified_kfold(labels, k=10, seed=3)
        for _, train, test in plan.iter_folds():
            assert len(test) == 10
            assert int(labels[test].sum()) == 5
            assert not set(train) & set(test)
        assert plan.n_folds == 10

    def test_kfold_folds_are_exhaustive(self, rng):
        labels = rng.integers(0, 2, size=53)
        plan = stratified_kfold(labels, k=5, seed=2)
        held_out = np.concatenate([test for _, _, test in plan.iter_folds()])
        assert sorted(held_out) == list(range(53))
        sizes = np.bincount(plan.folds)
        assert sizes.max() - sizes.min() <= 1

    def test_kfold_needs_enough_members(self):
        with pytest.raises(InsufficientClassMembers):
            stratified_kfold([1, 1, 1] + [0] * 20, k=5)

    def test_holdout_plan_has_no_folds(self):
        plan = stratified_split([0, 1] * 5)
        with pytest.raises(ContractViolation):
            plan.fold(0)


class TestFoldSummary:

    def test_identical_folds_have_zero_spread(self):
        report = classification_metrics([0.9, 0.2, 0.6], [1, 0, 0]).merge(
            regression_metrics([0.1, 0.3, 0.2], [0.2, 0.1, 0.4])
        )
        summary = summarize_folds([report] * 4)
        assert summary.mean["accuracy"] == pytest.approx(report.accuracy)
        assert summary.std["accuracy"] == pytest.approx(0.0, abs=1e-15)
        assert summary.ci_low["mae"] == pytest.approx(report.mae)
        assert summary.ci_high["mae"] == pytest.approx(report.mae)

    def test_metric_undefined_in_every_fold(self):
        report = classification_metrics([0.2, 0.7], [0, 0])
        summary = summarize_folds([report, report])
        assert summary.mean["roc_auc"] is None

    def test_interval_uses_sample_deviation(self):
        a = EvalReport(n=2, accuracy=0.6)
        b = EvalReport(n=2, accuracy=0.8)
        summary = summarize_folds([a, b])
        assert summary.std["accuracy"] == pytest.approx(np.std([0.6, 0.8], ddof=1))
        assert summary.ci_high["accuracy"] - summary.mean["accuracy"] == pytest.approx(
            1.959963984540054 * summary.std["accuracy"] / np.sqrt(2)
        )


class TestAblationSpecs:

    def test_standard_widths(self):
        widths = [width for _, width in ablation_widths(default_ablation_specs())]
        assert widths == [29, 22, 24, 28, 17, 21, 23]

    def test_expected_counts_agree_with_schema(self):
        for spec, (_, width) in zip(default_ablation_specs(), ablation_widths(default_ablation_specs())):
            assert spec.expected_feature_count == width

    def test_selection_by_label(self):
        specs = default_ablation_specs(["w/o sir", "Full Method"])
        assert [s.label for s in specs] == ["w/o SIR", "Full Method"]

    def test_unknown_label(self):
        with pytest.raises(ContractViolation):
            default_ablation_specs(["w/o Budget"])

    def test_base_group_cannot_be_removed(self):
        with pytest.raises(ContractViolation):
            AblationSpec("w/o Base", frozenset({FeatureGroup.BASE}), 13)


@pytest.fixture
def film_table(small_corpus, fast_config):
    movies, reviews = small_corpus
    return build_film_table(movies, reviews, None, fast_config)


class TestHarness:

    def test_holdout_report(self, film_table, fast_config):
        result = evaluate_holdout(film_table, fast_config)
        plan = holdout_split(film_table, fast_config)
        assert result.report.n == len(plan.test)
        assert 0.0 <= result.report.accuracy <= 1.0
        assert result.report.mae <= result.report.rmse
        assert result.prepared.train.width == 29

    def test_holdout_is_reproducible(self, film_table, fast_config):
        first = evaluate_holdout(film_table, fast_config)
        second = evaluate_holdout(film_table, fast_config)
        assert first.report == second.report
        assert first.params.identical_to(second.params)

    def test_preprocessing_sees_training_rows_only(self, film_table, fast_config):
        result = evaluate_holdout(film_table, fast_config)
        plan = holdout_split(film_table, fast_config)
        expected = FeaturePreprocessor(config=fast_config.features).fit(film_table.raw.iloc[plan.train])
        assert result.prepared.preprocessor.params() == expected.params()

    def test_empty_ablation_equals_plain_run(self, film_table, fast_config):
        rows = run_ablation(film_table, default_ablation_specs(["Full Method"]), fast_config)
        assert rows[0].num_features == 29
        assert rows[0].report == evaluate_holdout(film_table, fast_config).report

    def test_ablation_rows_follow_spec_order(self, film_table, fast_config):
        specs = default_ablation_specs(["w/o SIR & Sentiment", "w/o Events"])
        rows = run_ablation(film_table, specs, fast_config)
        assert [(r.spec.label, r.num_features) for r in rows] == [("w/o SIR & Sentiment", 17), ("w/o Events", 28)]

    def test_ablation_width_mismatch(self, film_table, fast_config):
        spec = AblationSpec("w/o SIR", frozenset({FeatureGroup.SIR}), 29)
        with pytest.raises(ContractViolation) as excinfo:
            run_ablation(film_table, [spec], fast_config)
        assert excinfo.value.details["ablation"] == "w/o SIR"

    def test_cross_validation_is_thread_count_independent(self, film_table, fast_config):
        serial = cross_validate(film_table, fast_config, k=3)
        fast_config.n_jobs = 3
        parallel = cross_validate(film_table, fast_config, k=3)
        assert len(serial.folds) == 3
        assert serial.folds == parallel.folds
        assert sum(r.n for r in serial.folds) == len(film_table)
        assert serial.std["accuracy"] >= 0.0


class TestReports:

    def test_metrics_frame_keeps_undefined_empty(self):
        good = classification_metrics([0.9, 0.1], [1, 0])
        degenerate = classification_metrics([0.2, 0.7], [0, 0])
        frame = metrics_frame([("good", good), ("degenerate", degenerate)])
        assert frame.loc[1, "ROC AUC"] is None or pd.isna(frame.loc[1, "ROC AUC"])
        assert "n/a" in format_table(frame)
        assert frame.loc[1, "Undefined"] == "recall;f1;roc_auc"

    def test_ablation_frame_columns(self):
        spec = default_ablation_specs(["Full Method"])[0]
        row = AblationRow(spec=spec, num_features=29, report=EvalReport(n=5, accuracy=0.8, f1=0.75, mae=0.3, rmse=0.4))
        frame = ablation_frame([row])
        assert list(frame.columns) == ["Removed Components", "Num Features", "Accuracy", "F1 Score", "MAE", "RMSE"]
        assert frame.iloc[0].tolist() == ["Full Method", 29, 0.8, 0.75, 0.3, 0.4]

    def test_write_report(self, tmp_path):
        frame = metrics_frame([("test", classification_metrics([0.9, 0.1], [1, 0]))])
        written = write_report(frame, tmp_path / "reports" / "metrics.csv", tmp_path / "reports" / "metrics.txt")
        assert [p.name for p in written] == ["metrics.csv", "metrics.txt"]
        back = pd.read_csv(written[0])
        assert back.loc[0, "Accuracy"] == 1.0
        assert "Accuracy" in written[1].read_text(encoding="utf-8")
