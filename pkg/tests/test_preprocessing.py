"""Tests for train-only column preprocessing and matrix preparation."""

import copy

import numpy as np
import pandas as pd
import pytest

from movie_success.errors import ContractViolation, EmptyDataset
from movie_success.models import FeatureGroup, FeatureSchema
from movie_success.pipeline import SIR_COLUMNS, build_film_table
from movie_success.preprocessing import (
    FeaturePreprocessor,
    FilmTable,
    MedianImputer,
    Standardizer,
    StepPipeline,
    Winsorizer,
    YeoJohnsonStep,
    column_pipeline,
    prepare_matrices,
)

LANGUAGES = ["English", "French", "Hindi", "Korean", "German"]


def raw_table(rng, n=80):
    """Raw film table with skewed numeric columns, a few gaps and categorical strings."""
    schema = FeatureSchema.default()
    pre = FeaturePreprocessor(schema)
    data = {}
    for name in pre.numeric_columns + list(schema.pca_inputs):
        data[name] = rng.gamma(2.0, 1.5, size=n)
    data["event_indicator"] = rng.choice([-1.0, 0.0, 1.0], size=n)
    data["sentiment_mean"][rng.choice(n, size=5, replace=False)] = np.nan
    data["language"] = rng.choice(LANGUAGES, size=n, p=[0.5, 0.2, 0.15, 0.1, 0.05])
    data["country"] = rng.choice(["US", "UK", "IN"], size=n)
    return FilmTable(
        raw=pd.DataFrame(data),
        labels=rng.integers(0, 2, size=n).astype(float),
        opening_weekend=rng.lognormal(15.0, 1.0, size=n),
        titles=tuple(f"Film {j}" for j in range(n)),
    )


class TestSteps:

    def test_median_imputer(self):
        step = MedianImputer().fit([1.0, np.nan, 3.0, 10.0])
        np.testing.assert_array_equal(step.transform([np.nan, 2.0]), [3.0, 2.0])

    def test_median_imputer_without_observations(self):
        step = MedianImputer().fit([np.nan, np.nan], {"column": "runtime"})
        np.testing.assert_array_equal(step.transform([np.nan]), [0.0])

    def test_standardizer_constant_column(self):
        step = Standardizer().fit([4.0, 4.0, 4.0])
        assert step.params() == {"mean": 4.0, "scale": 1.0}

    def test_yeo_johnson_step_falls_back_to_identity(self):
        step = YeoJohnsonStep().fit(np.full(30, 2.0), {"column": "gamma"})
        assert step.lambda_yj == 1.0

    def test_unfitted_step_refuses_to_transform(self):
        with pytest.raises(ContractViolation):
            Standardizer().transform([1.0])

    def test_pipeline_chains_fits(self, rng):
        values = rng.gamma(2.0, 2.0, size=200)
        pipeline = StepPipeline([MedianImputer(), Winsorizer(0.05, 0.95), Standardizer()])
        out = pipeline.fit_transform(values)
        clipped = np.clip(values, *np.quantile(values, [0.05, 0.95]))
        np.testing.assert_allclose(out, (clipped - clipped.mean()) / clipped.std())

    def test_pipeline_params_follow_fit_order(self):
        pipeline = StepPipeline([MedianImputer(), Standardizer()]).fit([1.0, np.nan, 5.0])
        params = pipeline.params()
        assert list(params) == ["MedianImputer", "Standardizer"]
        assert params["Standardizer"]["mean"] == pytest.approx(3.0)

    @pytest.mark.parametrize("tag,length", [("none", 1), ("standard", 3), ("yeo_johnson", 4)])
    def test_column_pipeline_tags(self, tag, length):
        assert len(column_pipeline(tag)) == length

    def test_unknown_tag(self):
        with pytest.raises(ContractViolation):
            column_pipeline("boxcox")


class TestFeaturePreprocessor:

    def test_output_follows_schema(self, rng):
        table = raw_table(rng)
        processed = FeaturePreprocessor().fit_transform(table.raw)
        assert list(processed.columns) == FeatureSchema.default().names
        assert np.all(np.isfinite(processed.to_numpy()))

    def test_one_hot_slots_sum_to_one(self, rng):
        table = raw_table(rng)
        processed = FeaturePreprocessor().fit(table.raw.iloc[:60]).transform(table.raw.iloc[60:])
        language = processed[[c for c in processed.columns if c.startswith("language_")]]
        np.testing.assert_array_equal(language.sum(axis=1).to_numpy(), np.ones(20))

    def test_transform_never_changes_fitted_state(self, rng):
        table = raw_table(rng)
        pre = FeaturePreprocessor().fit(table.raw.iloc[:60])
        before = copy.deepcopy(pre.params())
        pre.transform(table.raw.iloc[60:])
        pre.transform(table.raw)
        assert pre.params() == before

    def test_statistics_come_from_training_rows(self, rng):
        table = raw_table(rng)
        train = table.raw.iloc[:60]
        pre = FeaturePreprocessor().fit(train)
        stats = pre.params()["columns"]["runtime"]
        assert stats["Winsorizer"]["high"] == pytest.approx(np.quantile(train["runtime"], 0.99))
        full = FeaturePreprocessor().fit(table.raw).params()["columns"]["runtime"]
        assert full["Standardizer"]["mean"] != stats["Standardizer"]["mean"]

    def test_pca_scores_are_centred_on_training_rows(self, rng):
        table = raw_table(rng)
        processed = FeaturePreprocessor().fit_transform(table.raw)
        np.testing.assert_allclose(processed[["pc1", "pc2"]].mean().to_numpy(), [0.0, 0.0], atol=1e-10)

    def test_missing_column(self, rng):
        table = raw_table(rng)
        with pytest.raises(ContractViolation):
            FeaturePreprocessor().fit(table.raw.drop(columns=["beta"]))

    def test_zero_rows(self, rng):
        with pytest.raises(EmptyDataset):
            FeaturePreprocessor().fit(raw_table(rng).raw.iloc[:0])


class TestPrepareMatrices:

    def test_widths_and_finiteness(self, rng):
        table = raw_table(rng)
        split = prepare_matrices(table, np.arange(60), np.arange(60, 80))
        assert (len(split.train), len(split.test)) == (60, 20)
        assert split.train.width == split.test.width == 29
        assert np.all(np.isfinite(split.train.values)) and np.all(np.isfinite(split.test.values))
        assert split.test.titles == tuple(f"Film {j}" for j in range(60, 80))

    def test_mask_drops_groups(self, rng):
        split = prepare_matrices(raw_table(rng), np.arange(60), np.arange(60, 80), mask=[FeatureGroup.SIR])
        assert split.train.width == 22
        assert "pc1" not in split.train.names

    def test_target_scaler_uses_training_rows(self, rng):
        table = raw_table(rng)
        split = prepare_matrices(table, np.arange(60), np.arange(60, 80))
        assert split.target_scaler.mean == pytest.approx(np.mean(np.log1p(table.opening_weekend[:60])))
        assert split.train.targets.mean() == pytest.approx(0.0, abs=1e-12)

    def test_overlapping_rows(self, rng):
        with pytest.raises(ContractViolation):
            prepare_matrices(raw_table(rng), np.arange(60), np.arange(50, 80))

    def test_no_training_rows(self, rng):
        with pytest.raises(EmptyDataset):
            prepare_matrices(raw_table(rng), [], np.arange(10))

    def test_empty_test_split(self, rng):
        split = prepare_matrices(raw_table(rng), np.arange(80), [])
        assert len(split.test) == 0 and split.test.width == 29


class TestFilmTable:

    def test_from_synthetic_corpus(self, small_corpus, fast_config):
        movies, reviews = small_corpus
        table = build_film_table(movies, reviews, None, fast_config)
        assert len(table) == len(movies)
        assert set(SIR_COLUMNS) <= set(table.raw.columns)
        assert {"language", "country", "event_indicator", "log_budget"} <= set(table.raw.columns)
        assert set(np.unique(table.labels)) <= {0.0, 1.0}
        assert 0.0 < table.positive_share < 1.0

    def test_lengths_must_agree(self):
        with pytest.raises(ContractViolation):
            FilmTable(raw=pd.DataFrame({"a": [1.0, 2.0]}), labels=np.zeros(2), opening_weekend=np.ones(3), titles=("x", "y"))
