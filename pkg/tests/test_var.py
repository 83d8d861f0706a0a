# tests/test_var.py
"""
VAR Tests

Estimation, companion-form dynamics, impulse responses, FEVD and lag selection.
"""

from __future__ import annotations

import numpy as np
import pytest

from macro.errors import (
    DuplicateVariable,
    InsufficientObservations,
    InvalidParameter,
    RankDeficient,
    ShapeMismatch,
)
from macro.timeseries import apply_transform, complete_cases
from macro.var import (
    Criterion,
    VarProcess,
    VarSpec,
    build_regression,
    companion_matrix,
    cumulative_irf,
    estimate_var,
    fevd,
    ma_coefficients,
    orthogonal_irf,
    permute_process,
    reduced_form_irf,
    select_lag,
    simulate_var,
    stability,
)


def _process(lags, sigma=None, intercept=None, names=None):
    lags = tuple(np.atleast_2d(np.asarray(a, dtype=float)) for a in lags)
    m = lags[0].shape[0]
    names = names or tuple(f"y{i + 1}" for i in range(m))
    return VarProcess(
        spec=VarSpec(names, lag_order=len(lags)),
        intercept=np.zeros(m) if intercept is None else intercept,
        lag_matrices=lags,
        sigma=np.eye(m) if sigma is None else np.atleast_2d(sigma),
    )


def _random_stable_process(rng, m, p):
    while True:
        lags = [rng.standard_normal((m, m)) * (0.4 / (m * p)) for _ in range(p)]
        G = rng.standard_normal((m, m))
        process = _process(lags, sigma=G @ G.T + np.eye(m), intercept=rng.standard_normal(m))
        if stability(process).is_stable:
            return process


def _brazil_sample(panels):
    panel = apply_transform(panels["Brazil"].select(["gdp", "interest_rate"]), "gdp", "log")
    return complete_cases(panel, ["gdp", "interest_rate"])


class TestVarSpec:
    """Tests for model specification."""

    def test_regressor_count(self):
        """Test the number of regressors per equation."""
        assert VarSpec(("a", "b"), lag_order=2).n_regressors == 5
        assert VarSpec(("a", "b"), lag_order=2, include_intercept=False).n_regressors == 4

    def test_rejects_repeated_names(self):
        """Test a variable listed twice."""
        with pytest.raises(DuplicateVariable):
            VarSpec(("gdp", "gdp"))

    def test_rejects_zero_lags(self):
        """Test a lag order of zero."""
        with pytest.raises(InvalidParameter):
            VarSpec(("gdp",), lag_order=0)


class TestBuildRegression:
    """Tests for the stacked VAR design."""

    def test_shapes(self):
        """Test the design and response shapes."""
        X, Y = build_regression(np.ones((23, 2)), VarSpec(("a", "b")))

        assert X.shape == (22, 3)
        assert Y.shape == (22, 2)

    def test_row_layout(self):
        """Test the lag layout of a design row."""
        data = np.arange(14, dtype=float).reshape(7, 2)
        X, Y = build_regression(data, VarSpec(("a", "b"), lag_order=2))

        # row 0: [1, y_1, y_0] predicting y_2
        assert list(X[0]) == [1.0, 2.0, 3.0, 0.0, 1.0]
        assert list(Y[0]) == [4.0, 5.0]

    def test_minimal_square_design(self):
        """Test the shortest accepted sample."""
        X, Y = build_regression(np.array([[1.0], [2.0], [4.0]]), VarSpec(("a",)))

        assert X.shape == (2, 2)
        assert Y.shape == (2, 1)

    def test_too_short(self):
        """Test a sample shorter than the design needs."""
        with pytest.raises(InsufficientObservations):
            build_regression(np.ones((3, 2)), VarSpec(("a", "b")))

    def test_column_count_mismatch(self):
        """Test data with the wrong number of columns."""
        with pytest.raises(ShapeMismatch):
            build_regression(np.ones((10, 3)), VarSpec(("a", "b")))


class TestEstimateVar:
    """Tests for least-squares VAR estimation."""

    def test_brazil_bivariate(self, panels):
        """Test the default Brazil estimate."""
        estimate = estimate_var(_brazil_sample(panels), VarSpec(("gdp", "interest_rate")))

        assert estimate.lag_matrices[0].shape == (2, 2)
        assert estimate.residuals.shape == (22, 2)
        assert estimate.df_resid == 19
        assert list(estimate.sample_years[:2]) == [2001, 2002]

    def test_sigma_symmetric(self, panels):
        """Test that the residual covariance is symmetric."""
        estimate = estimate_var(_brazil_sample(panels), VarSpec(("gdp", "interest_rate")))

        assert np.array_equal(estimate.sigma, estimate.sigma.T)

    def test_divisors(self, panels):
        """Test both residual covariance divisors."""
        sample = _brazil_sample(panels)
        spec = VarSpec(("gdp", "interest_rate"))
        dof = estimate_var(sample, spec, "dof")
        mle = estimate_var(sample, spec, "mle")

        np.testing.assert_allclose(dof.sigma * 19, mle.sigma * 22, rtol=1e-12)
        np.testing.assert_array_equal(dof.lag_matrices[0], mle.lag_matrices[0])

    def test_residual_means_vanish_with_intercept(self, panels):
        """Test that residuals average to zero with an intercept."""
        estimate = estimate_var(_brazil_sample(panels), VarSpec(("gdp", "interest_rate")))
        scale = np.abs(estimate.residuals).max(axis=0)

        assert np.all(np.abs(estimate.residuals.mean(axis=0)) < 1e-10 * scale)

    def test_constant_series_rank_deficient(self):
        """Test a constant series."""
        with pytest.raises(RankDeficient):
            estimate_var(np.full((10, 1), 3.0), VarSpec(("a",)))

    def test_needs_a_residual_degree_of_freedom(self):
        """Test a sample with no residual degree of freedom."""
        with pytest.raises(InsufficientObservations):
            estimate_var(np.array([[1.0], [2.0], [4.0]]), VarSpec(("a",)))

    def test_recovers_known_coefficients(self, var1_process, simulate_series):
        """Test recovering a known process from a long sample."""
        data = simulate_series(var1_process, T=10000, seed=1)
        estimate = estimate_var(data, var1_process.spec)

        np.testing.assert_allclose(estimate.lag_matrices[0], var1_process.lag_matrices[0], atol=0.05)
        np.testing.assert_allclose(estimate.sigma, var1_process.sigma, atol=0.1)
        np.testing.assert_allclose(estimate.intercept, 0.0, atol=0.05)

    def test_coefficient_table_names(self, panels):
        """Test the regressor names in the coefficient table."""
        estimate = estimate_var(_brazil_sample(panels), VarSpec(("gdp", "interest_rate")))
        table = estimate.coefficient_table()

        assert [row["regressor"] for row in table[:3]] == ["const", "L1.gdp", "L1.interest_rate"]
        assert table[1]["coefficient"] == estimate.lag_matrices[0][0, 0]

    def test_ordering_equivariance(self, var1_process, simulate_series):
        """Test that reordering variables permutes the estimate."""
        data = simulate_series(var1_process, T=200, seed=5)
        original = estimate_var(data, var1_process.spec)
        swapped = estimate_var(data[:, [1, 0]], VarSpec(("y2", "y1")))
        relabeled = permute_process(original, [1, 0])

        np.testing.assert_allclose(swapped.intercept, relabeled.intercept, atol=1e-10)
        np.testing.assert_allclose(swapped.lag_matrices[0], relabeled.lag_matrices[0], atol=1e-10)
        np.testing.assert_allclose(swapped.sigma, relabeled.sigma, atol=1e-10)

        phi = reduced_form_irf(original, 8)
        phi_swapped = reduced_form_irf(swapped, 8)
        idx = np.ix_([1, 0], [1, 0])
        for h in range(9):
            np.testing.assert_allclose(phi_swapped[h], phi[h][idx], atol=1e-10)


class TestDynamics:
    """Tests for companion form, stability and MA coefficients."""

    def test_companion_var1_is_lag_matrix(self, var1_process):
        """Test the companion matrix of a VAR(1)."""
        assert np.array_equal(companion_matrix(var1_process), var1_process.lag_matrices[0])

    def test_companion_univariate_ar2(self):
        """Test the companion matrix of an AR(2)."""
        process = _process([[[0.5]], [[0.3]]])

        assert np.array_equal(companion_matrix(process), [[0.5, 0.3], [1.0, 0.0]])

    def test_companion_identity_block(self):
        """Test the shift block of the companion matrix."""
        process = _process([np.full((2, 2), 0.1), np.full((2, 2), 0.2)])
        F = companion_matrix(process)

        assert F.shape == (4, 4)
        assert np.array_equal(F[2:, :2], np.eye(2))
        assert np.array_equal(F[2:, 2:], np.zeros((2, 2)))

    def test_stability_half_identity(self):
        """Test a stable diagonal process."""
        report = stability(_process([0.5 * np.eye(2)]))

        assert report.is_stable
        assert abs(report.radius - 0.5) < 1e-15

    def test_unit_root_not_stable(self):
        """Test a unit root."""
        report = stability(_process([np.eye(2)]))

        assert not report.is_stable
        assert abs(report.radius - 1.0) < 1e-15

    def test_triangular_stability(self):
        """Test stability read from a triangular matrix."""
        report = stability(_process([[[0.5, 0.3], [0.0, 0.2]]]))

        assert abs(report.radius - 0.5) < 1e-12

    def test_ma_of_zero_process(self):
        """Test the MA coefficients of a white-noise process."""
        phi = ma_coefficients(_process([np.zeros((2, 2))]), 4)

        assert np.array_equal(phi[0], np.eye(2))
        assert np.array_equal(phi[1:], np.zeros((4, 2, 2)))

    def test_ma_univariate_powers(self):
        """Test that AR(1) MA coefficients are powers."""
        phi = ma_coefficients(_process([[[0.5]]]), 6)

        np.testing.assert_allclose(phi[:, 0, 0], 0.5 ** np.arange(7), rtol=1e-15)

    def test_ma_second_step(self):
        """Test the second MA coefficient of a VAR(2)."""
        A1 = np.array([[0.5, 0.1], [0.2, 0.3]])
        A2 = np.array([[0.1, 0.0], [0.0, 0.1]])
        phi = ma_coefficients(_process([A1, A2]), 2)

        np.testing.assert_allclose(phi[2], A1 @ A1 + A2, atol=1e-14)

    def test_negative_horizon(self, var1_process):
        """Test a negative horizon."""
        with pytest.raises(InvalidParameter):
            ma_coefficients(var1_process, -1)


class TestImpulseResponses:
    """Tests for orthogonal and reduced-form responses."""

    def test_zero_process_identity_sigma(self):
        """Test responses of white noise with unit covariance."""
        irf = orthogonal_irf(_process([np.zeros((2, 2))]), 3)

        assert np.array_equal(irf.point[0], np.eye(2))
        assert np.array_equal(irf.point[1:], np.zeros((3, 2, 2)))

    def test_univariate_scaled_by_std(self):
        """Test that univariate responses scale by the shock size."""
        irf = orthogonal_irf(_process([[[0.5]]], sigma=[[4.0]]), 5)

        np.testing.assert_allclose(irf.point[:, 0, 0], 2.0 * 0.5 ** np.arange(6), rtol=1e-14)

    def test_impact_is_cholesky_factor(self):
        """Test that impact responses are the Cholesky factor."""
        sigma = np.array([[4.0, 2.0], [2.0, 3.0]])
        irf = orthogonal_irf(_process([np.zeros((2, 2))], sigma=sigma), 0)

        np.testing.assert_allclose(irf.point[0], [[2.0, 0.0], [1.0, np.sqrt(2.0)]], atol=1e-15)
        assert irf.point[0, 0, 1] == 0.0

    def test_shape_and_metadata(self, var1_process):
        """Test the response array shape and metadata."""
        irf = orthogonal_irf(var1_process, 10)

        assert irf.point.shape == (11, 2, 2)
        assert irf.ordering == ("y1", "y2")
        assert irf.metadata["identification"] == "cholesky"
        assert not irf.has_bands

    def test_matches_simulated_impulse(self):
        """Test responses against a simulated one-time shock."""
        rng = np.random.default_rng(42)
        horizon = 20
        for trial in range(20):
            m, p = int(rng.integers(1, 4)), 1 + trial % 2
            process = _random_stable_process(rng, m, p)
            phi = reduced_form_irf(process, horizon)
            initial = rng.standard_normal((p, m))
            baseline = simulate_var(process, initial, np.zeros((horizon + 1, m)))

            for j in range(m):
                impulse = np.zeros((horizon + 1, m))
                impulse[0, j] = 1.0
                shocked = simulate_var(process, initial, impulse)
                delta = shocked[p:] - baseline[p:]

                np.testing.assert_allclose(delta, phi[:, :, j], atol=1e-10)

    def test_stable_responses_decay(self):
        """Test that stable responses die out."""
        rng = np.random.default_rng(9)
        for _ in range(10):
            process = _random_stable_process(rng, 3, 2)
            theta = orthogonal_irf(process, 60).point

            assert np.max(np.abs(theta[60])) < np.max(np.abs(theta[30]))

    def test_cumulative(self):
        """Test cumulative responses."""
        irf = orthogonal_irf(_process([[[0.5]]]), 3)

        np.testing.assert_allclose(cumulative_irf(irf.point)[:, 0, 0], [1.0, 1.5, 1.75, 1.875])

    def test_response_accessor(self, var1_process):
        """Test looking up one response by name."""
        irf = orthogonal_irf(var1_process, 4)

        assert np.array_equal(irf.response("y1", "y2"), irf.point[:, 0, 1])


class TestFevd:
    """Tests for forecast error variance decomposition."""

    def test_univariate_all_own(self):
        """Test a single variable explains all its own variance."""
        shares = fevd(_process([[[0.7]]], sigma=[[2.0]]), 5)

        np.testing.assert_allclose(shares, 1.0)

    def test_diagonal_sigma_no_dynamics(self):
        """Test independent shocks with no dynamics."""
        shares = fevd(_process([np.zeros((2, 2))], sigma=np.diag([1.0, 3.0])), 4)

        for h in range(5):
            np.testing.assert_allclose(shares[h], np.eye(2), atol=1e-15)

    def test_rows_sum_to_one(self, var1_process):
        """Test that variance shares sum to one."""
        shares = fevd(var1_process, 10)

        np.testing.assert_allclose(shares.sum(axis=2), 1.0, rtol=1e-12)
        assert np.all(shares >= 0)


class TestSelectLag:
    """Tests for information-criterion lag selection."""

    def test_single_candidate(self, var1_process, simulate_series):
        """Test choosing from a single lag order."""
        selection = select_lag(simulate_series(var1_process, 50, seed=2), var1_process.spec, 1)

        assert selection.chosen == 1
        assert set(selection.table[1]) == {"aic", "bic", "hq"}

    def test_common_sample(self, var1_process, simulate_series):
        """Test that every candidate uses the same sample."""
        selection = select_lag(simulate_series(var1_process, 60, seed=3), var1_process.spec, 4, "aic")

        assert selection.nobs == 56
        assert selection.criterion is Criterion.AIC
        assert sorted(selection.table) == [1, 2, 3, 4]

    def test_too_short_for_p_max(self):
        """Test a sample too short for the largest lag."""
        with pytest.raises(InsufficientObservations):
            select_lag(np.ones((8, 2)), VarSpec(("a", "b")), 3)

    def test_bic_prefers_one_lag_for_white_noise(self):
        """Test BIC on white noise."""
        spec = VarSpec(("a", "b"))
        ones = 0
        for seed in range(100):
            data = np.random.default_rng(seed).standard_normal((100, 2))
            ones += select_lag(data, spec, 4, Criterion.BIC).chosen == 1

        assert ones > 50

    def test_recovers_ar2(self, simulate_series):
        """Test recovering the order of an AR(2)."""
        process = _process([[[0.2]], [[0.6]]])
        selection = select_lag(simulate_series(process, 2000, seed=4), process.spec, 4, "bic")

        assert selection.chosen == 2
