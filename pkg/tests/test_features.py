"""Tests for power transforms, winsorization, PCA, labels and vector assembly."""

import math

import numpy as np
import pytest
from scipy import stats

from movie_success.errors import ContractViolation, DegenerateColumn, MissingBudget, RankDeficient
from movie_success.features import (
    BudgetImputer,
    CategoryVocabulary,
    FeatureMatrix,
    TargetScaler,
    assemble,
    base_columns,
    compute_label,
    compute_roi,
    director_prior_films,
    event_indicator,
    fit_winsor_bounds,
    fit_yeo_johnson,
    month_cycle,
    pca_fit,
    pca_project,
    pca_reconstruct,
    winsorize,
    yeo_johnson,
    yeo_johnson_inverse,
    yeo_johnson_llf,
)
from movie_success.models import FeatureGroup, FeatureSchema, MovieRecord
from movie_success.models.features import EXPECTED_GROUP_SIZES

LAMBDAS = (-2.0, 0.0, 0.5, 1.0, 2.0, 3.0)


def film(title="F", **kwargs):
    return MovieRecord(title=title, **kwargs)


def jacobi_eigh(matrix, sweeps=100, tol=1e-14):
    """Cyclic Jacobi rotations; returns (eigenvalues, eigenvectors as columns)."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    vectors = np.eye(n)
    for _ in range(sweeps):
        if np.sqrt(np.sum(np.tril(a, -1) ** 2)) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                vectors = vectors @ rot
    return np.diag(a), vectors


class TestYeoJohnson:

    def test_reference_values(self):
        assert yeo_johnson(2.0, 1.0) == pytest.approx(2.0, abs=1e-12)
        assert yeo_johnson(0.0, 0.0) == 0.0
        assert yeo_johnson(-1.0, 2.0) == pytest.approx(-math.log(2.0), abs=1e-12)

    @pytest.mark.parametrize("lmbda", LAMBDAS + (-0.7, 1.3, 4.5))
    def test_matches_scipy(self, lmbda):
        x = np.linspace(-10.0, 10.0, 401)
        np.testing.assert_allclose(yeo_johnson(x, lmbda), stats.yeojohnson(x, lmbda), rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("lmbda", LAMBDAS)
    def test_inverse_round_trip(self, lmbda):
        x = np.linspace(-10.0, 10.0, 201)
        np.testing.assert_allclose(yeo_johnson_inverse(yeo_johnson(x, lmbda), lmbda), x, atol=1e-9)

    @pytest.mark.parametrize("lmbda", LAMBDAS)
    def test_strictly_increasing(self, lmbda):
        y = yeo_johnson(np.linspace(-10.0, 10.0, 201), lmbda)
        assert np.all(np.diff(y) > 0)

    def test_identity_at_one_for_nonnegative_x(self):
        x = np.linspace(0.0, 10.0, 101)
        np.testing.assert_allclose(yeo_johnson(x, 1.0), x, atol=1e-12)

    def test_continuous_near_special_lambdas(self):
        x = np.array([0.0, 0.3, 2.0, 9.0])
        np.testing.assert_allclose(yeo_johnson(x, 1e-9), np.log1p(x), atol=1e-7)
        np.testing.assert_allclose(yeo_johnson(-x, 2.0 + 1e-9), -np.log1p(x), atol=1e-7)

    def test_scalar_in_scalar_out(self):
        assert isinstance(yeo_johnson(0.5, 0.5), float)


class TestYeoJohnsonFit:

    def test_normal_column_stays_near_identity(self, rng):
        lmbda = fit_yeo_johnson(rng.standard_normal(1000)).lambda_yj
        assert 0.8 <= lmbda <= 1.2

    def test_log_like_column_recovers_log(self, rng):
        # lambda = 0 maps this column back to a standard normal sample
        column = yeo_johnson_inverse(rng.standard_normal(1000), 0.0)
        lmbda = fit_yeo_johnson(column).lambda_yj
        assert -0.2 <= lmbda <= 0.3

    def test_recovers_planted_exponent(self, rng):
        column = yeo_johnson_inverse(rng.standard_normal(1000), 0.5)
        assert fit_yeo_johnson(column).lambda_yj == pytest.approx(0.5, abs=0.3)

    def test_left_skewed_column_needs_lambda_above_one(self, rng):
        column = -rng.exponential(2.0, size=1000)
        fitted = fit_yeo_johnson(column).lambda_yj
        grid = np.linspace(-5.0, 5.0, 2001)
        best = grid[np.argmax([yeo_johnson_llf(lm, column) for lm in grid])]
        assert fitted > 1.0
        assert fitted == pytest.approx(best, abs=5e-3)

    def test_likelihood_matches_scipy(self, rng):
        data = rng.gamma(2.0, 3.0, size=300) - 1.0
        for lmbda in (-1.0, 0.0, 0.7, 2.0):
            assert yeo_johnson_llf(lmbda, data) == pytest.approx(stats.yeojohnson_llf(lmbda, data), rel=1e-8)

    def test_records_column_name(self, rng):
        assert fit_yeo_johnson(rng.standard_normal(50), name="beta").fitted_on == "beta"

    def test_constant_column_is_degenerate(self):
        with pytest.raises(DegenerateColumn):
            fit_yeo_johnson(np.full(20, 3.0))

    def test_short_column_is_rejected(self):
        with pytest.raises(ContractViolation):
            fit_yeo_johnson(np.arange(5.0))


class TestWinsorize:

    def test_one_to_hundred(self):
        column = np.arange(1.0, 101.0)
        out = winsorize(column)
        assert out[0] == pytest.approx(np.quantile(column, 0.01))
        assert out[-1] == pytest.approx(np.quantile(column, 0.99))
        np.testing.assert_array_equal(out[2:-2], column[2:-2])

    def test_constant_column_unchanged(self):
        np.testing.assert_array_equal(winsorize([5.0, 5.0, 5.0]), [5.0, 5.0, 5.0])

    def test_outlier_replaced_by_interpolated_quantile(self):
        out = winsorize([1.0, 2.0, 3.0, 1000.0])
        # position 3 * 0.99 = 2.97 between order statistics 3 and 1000
        assert out[3] == pytest.approx(3.0 + 0.97 * 997.0)
        assert out[0] == pytest.approx(1.03)
        assert list(out[1:3]) == [2.0, 3.0]

    def test_fitted_bounds_are_idempotent(self, rng):
        bounds = fit_winsor_bounds(rng.standard_t(2, size=500))
        once = bounds.apply(rng.standard_t(2, size=500))
        np.testing.assert_array_equal(bounds.apply(once), once)

    def test_refitting_on_clipped_data_moves_bounds_inward(self):
        column = np.arange(1.0, 101.0)
        once = winsorize(column)
        twice = winsorize(once)
        assert once[0] == pytest.approx(1.99)
        assert twice[0] == pytest.approx(1.9999)
        bounds = fit_winsor_bounds(column)
        np.testing.assert_array_equal(bounds.apply(once), once)

    def test_bounds_ignore_nan(self):
        bounds = fit_winsor_bounds([np.nan, 1.0, 2.0, 3.0], 0.0, 1.0)
        assert (bounds.low, bounds.high) == (1.0, 3.0)
        assert np.isnan(bounds.apply([np.nan])[0])

    def test_empty_column(self):
        with pytest.raises(ContractViolation):
            winsorize([])


class TestPCA:

    def test_points_on_a_line(self):
        t = np.linspace(0.0, 1.0, 20)
        model = pca_fit(np.column_stack([t, 2.0 * t + 1.0]), k=2, strict=False)
        np.testing.assert_allclose(model.explained_variance_ratio, [1.0, 0.0], atol=1e-9)

    def test_rank_deficiency_is_an_error_when_strict(self):
        t = np.linspace(0.0, 1.0, 20)
        with pytest.raises(RankDeficient):
            pca_fit(np.column_stack([t, 3.0 * t]), k=2)

    def test_matches_jacobi_oracle(self, rng):
        data = rng.standard_normal((5, 5))
        model = pca_fit(data, k=2)

        standardized = (data - data.mean(axis=0)) / data.std(axis=0, ddof=1)
        eigvals, eigvecs = jacobi_eigh(standardized.T @ standardized / 4.0)
        order = np.argsort(eigvals)[::-1]
        for j in range(2):
            expected = eigvecs[:, order[j]]
            expected = expected if expected[np.argmax(np.abs(expected))] > 0 else -expected
            np.testing.assert_allclose(model.components[j], expected, atol=1e-8)
        np.testing.assert_allclose(
            model.explained_variance_ratio, eigvals[order[:2]] / eigvals.sum(), atol=1e-8
        )

    def test_components_orthonormal_and_ratios_sorted(self, rng):
        model = pca_fit(rng.standard_normal((200, 6)) @ rng.standard_normal((6, 6)), k=4)
        np.testing.assert_allclose(model.components @ model.components.T, np.eye(4), atol=1e-8)
        ratios = model.explained_variance_ratio
        assert np.all(np.diff(ratios) <= 0)
        assert ratios.sum() <= 1.0 + 1e-9

    def test_sign_convention(self, rng):
        model = pca_fit(rng.standard_normal((50, 3)), k=3)
        for row in model.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_mean_row_projects_to_zero(self, rng):
        data = rng.standard_normal((40, 3))
        model = pca_fit(data, k=2)
        np.testing.assert_allclose(pca_project(model, data.mean(axis=0)), [0.0, 0.0], atol=1e-12)

    def test_full_rank_reconstruction(self, rng):
        data = rng.standard_normal((30, 4)) * [1.0, 10.0, 0.1, 3.0]
        model = pca_fit(data, k=4)
        np.testing.assert_allclose(pca_reconstruct(model, pca_project(model, data)), data, atol=1e-8)

    def test_projection_checks_width(self, rng):
        model = pca_fit(rng.standard_normal((20, 3)), k=2)
        with pytest.raises(ContractViolation):
            pca_project(model, np.zeros(4))

    def test_k_larger_than_width(self, rng):
        with pytest.raises(ContractViolation):
            pca_fit(rng.standard_normal((20, 2)), k=3)


class TestLabels:

    @pytest.mark.parametrize(
        "opening,budget,label",
        [(50.0, 100.0, 1), (49.0, 100.0, 0), (30.0, 20.0, 1)],
    )
    def test_success_threshold(self, opening, budget, label):
        record = film(opening_weekend=opening, budget=budget)
        assert compute_label(record) == label

    def test_roi(self):
        assert compute_roi(film(opening_weekend=30.0, budget=20.0)) == pytest.approx(1.5)

    def test_missing_budget(self):
        with pytest.raises(MissingBudget):
            compute_label(film(opening_weekend=30.0))
        with pytest.raises(MissingBudget):
            compute_roi(film(opening_weekend=30.0, budget=0.0))

    @pytest.mark.parametrize("year,value", [(2020, -1.0), (2014, 1.0), (2006, 0.0), (2008, -1.0), (1999, 0.0)])
    def test_event_indicator(self, year, value):
        assert event_indicator(year) == value

    def test_budget_imputation_uses_nearby_years(self):
        known = [
            film("A", budget=10.0, release_year=2010),
            film("B", budget=20.0, release_year=2011),
            film("C", budget=100.0, release_year=2020),
        ]
        missing = [film("D", release_year=2012), film("E", release_year=2035)]
        filled = BudgetImputer(year_window=2).fit(known + missing).apply(known + missing)
        assert filled[3].budget == pytest.approx(15.0)
        assert filled[4].budget == pytest.approx(20.0)
        assert filled[3].metadata["budget_imputed"] is True
        assert "budget_imputed" not in filled[0].metadata


class TestMetadataColumns:

    def test_month_cycle(self):
        assert month_cycle(1) == pytest.approx((0.0, 1.0))
        assert month_cycle(4) == pytest.approx((1.0, 0.0), abs=1e-12)
        with pytest.raises(ContractViolation):
            month_cycle(13)

    def test_director_prior_films(self):
        records = [
            film("A", director="Kim", release_year=2010),
            film("B", director="kim ", release_year=2012),
            film("C", director="Kim", release_year=2015),
            film("D", director="Other", release_year=2015),
        ]
        assert director_prior_films(records) == {"A": 0, "B": 1, "C": 2, "D": 0}

    def test_vocabulary_ties_break_alphabetically(self):
        vocab = CategoryVocabulary.fit(["French", "English", "German", "English", "Hindi", "French"], top_k=3)
        assert vocab.values == ("English", "French", "German")
        assert vocab.encode("Hindi") == [0.0, 0.0, 0.0, 1.0]
        assert vocab.encode("French") == [0.0, 1.0, 0.0, 0.0]

    def test_vocabulary_padding(self):
        vocab = CategoryVocabulary.fit(["English"], top_k=3)
        assert vocab.encode_padded("English") == [1.0, 0.0, 0.0, 0.0]
        assert vocab.encode_padded("Korean") == [0.0, 0.0, 0.0, 1.0]

    def test_base_columns(self, movie):
        cols = base_columns(movie, prior_films=2)
        assert cols["log_budget"] == pytest.approx(math.log(1.0e7))
        assert cols["production_company_count"] == 2.0
        assert cols["writer_count"] == 2.0
        assert cols["release_year_norm"] == pytest.approx(0.5)


class TestSchemaAndAssembly:

    @staticmethod
    def columns(schema):
        return {name: float(j) for j, name in enumerate(schema.names) if not name.startswith("pc")}

    def test_packaged_schema(self):
        schema = FeatureSchema.default()
        assert len(schema) == 29
        assert schema.group_sizes() == EXPECTED_GROUP_SIZES
        assert len(set(schema.names)) == 29

    @pytest.mark.parametrize(
        "mask,width",
        [
            ((), 29),
            ((FeatureGroup.SIR, FeatureGroup.SENTIMENT), 17),
            ((FeatureGroup.EVENTS,), 28),
            ((FeatureGroup.SIR,), 22),
            ((FeatureGroup.SENTIMENT,), 24),
        ],
    )
    def test_mask_widths(self, mask, width):
        schema = FeatureSchema.default()
        vector = assemble(self.columns(schema), [0.1, 0.2], 1.0, 1, 0.3, mask=mask, schema=schema)
        assert len(vector) == width
        assert not set(vector.names) & {n for g in mask for n in schema.names_in(g)}

    def test_values_follow_schema_order(self):
        schema = FeatureSchema.default()
        vector = assemble(self.columns(schema), [0.1, 0.2], -1.0, 0, 0.0, schema=schema)
        assert list(vector.names) == schema.names
        assert vector.get("pc2") == 0.2
        assert vector.get("event_indicator") == -1.0
        assert vector.get("beta") == 0.0

    def test_masking_every_group_fails(self):
        schema = FeatureSchema.default()
        with pytest.raises(ContractViolation):
            assemble(self.columns(schema), [0.1, 0.2], 0.0, 0, 0.0, mask=list(FeatureGroup), schema=schema)

    def test_non_finite_value_fails(self):
        schema = FeatureSchema.default()
        columns = {**self.columns(schema), "runtime": float("nan")}
        with pytest.raises(ContractViolation):
            assemble(columns, [0.1, 0.2], 0.0, 0, 0.0, schema=schema)

    def test_target_scaler(self):
        scaler = TargetScaler().fit([1e6, 1e7, 1e8])
        scaled = scaler.transform([1e6, 1e7, 1e8])
        assert scaled.mean() == pytest.approx(0.0, abs=1e-12)
        assert scaled.std() == pytest.approx(1.0)
        np.testing.assert_allclose(scaler.inverse(scaled), [1e6, 1e7, 1e8], rtol=1e-10)

    def test_matrix_frame_round_trip(self):
        matrix = FeatureMatrix(
            values=np.array([[0.5, 1.0], [1.5, -2.0]]),
            names=("a", "b"),
            labels=np.array([1.0, 0.0]),
            targets=np.array([0.3, -0.3]),
            titles=("X", "Y"),
        )
        back = FeatureMatrix.from_frame(matrix.to_frame())
        assert back.names == ("a", "b")
        assert back.titles == ("X", "Y")
        np.testing.assert_array_equal(back.values, matrix.values)
        np.testing.assert_array_equal(back.labels, matrix.labels)
