# tests/test_numerics.py
"""
Numerics Tests

Least squares, Cholesky factorization and spectral radius.
"""

from __future__ import annotations

import numpy as np
import pytest

from macro.errors import NotPositiveDefinite, NotSymmetric, RankDeficient, ShapeMismatch
from macro.numerics import cholesky_lower, least_squares, log_det_spd, spectral_radius


class TestLeastSquares:
    """Tests for QR least squares."""

    def test_column_of_ones_gives_mean(self):
        """Test that a constant regressor recovers the mean."""
        B = least_squares(np.ones((3, 1)), np.array([[3.0], [4.0], [5.0]]))

        assert B.shape == (1, 1)
        assert abs(B[0, 0] - 4.0) < 1e-14

    def test_exact_fit(self):
        """Test an exactly determined fit."""
        X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]])
        Y = np.array([[1.0], [3.0], [5.0]])

        np.testing.assert_allclose(least_squares(X, Y)[:, 0], [1.0, 2.0], atol=1e-12)

    def test_vector_response(self):
        """Test a one-dimensional response."""
        B = least_squares(np.ones((4, 1)), np.array([1.0, 2.0, 3.0, 4.0]))

        assert B.shape == (1,)
        assert abs(B[0] - 2.5) < 1e-14

    def test_duplicate_column_rank_deficient(self):
        """Test that repeated columns are rank deficient."""
        X = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])

        with pytest.raises(RankDeficient):
            least_squares(X, np.array([[1.0], [2.0], [3.0]]))

    def test_fewer_rows_than_columns(self):
        """Test an underdetermined design."""
        with pytest.raises(RankDeficient):
            least_squares(np.ones((1, 2)), np.ones((1, 1)))

    def test_row_count_mismatch(self):
        """Test designs and responses of different lengths."""
        with pytest.raises(ShapeMismatch):
            least_squares(np.ones((3, 1)), np.ones((2, 1)))

    def test_matches_normal_equations(self):
        """Test agreement with the normal equations."""
        rng = np.random.default_rng(20240501)
        for _ in range(50):
            k = int(rng.integers(1, 6))
            T = int(rng.integers(k + 3, 31))
            m = int(rng.integers(1, 4))
            X = rng.standard_normal((T, k))
            Y = rng.standard_normal((T, m))

            expected = np.linalg.solve(X.T @ X, X.T @ Y)

            np.testing.assert_allclose(least_squares(X, Y), expected, rtol=1e-8, atol=1e-10)

    def test_residuals_orthogonal_to_regressors(self):
        """Test that residuals are orthogonal to the design."""
        rng = np.random.default_rng(7)
        X = rng.standard_normal((40, 4))
        Y = rng.standard_normal((40, 2))
        residuals = Y - X @ least_squares(X, Y)

        assert np.max(np.abs(X.T @ residuals)) < 1e-10


class TestCholesky:
    """Tests for the lower Cholesky factor."""

    def test_identity(self):
        """Test the factor of the identity."""
        assert np.array_equal(cholesky_lower(np.eye(3)), np.eye(3))

    def test_two_by_two(self):
        """Test a worked two-by-two factor."""
        P = cholesky_lower(np.array([[4.0, 2.0], [2.0, 3.0]]))

        np.testing.assert_allclose(P, [[2.0, 0.0], [1.0, np.sqrt(2.0)]], atol=1e-15)

    def test_indefinite(self):
        """Test an indefinite matrix."""
        with pytest.raises(NotPositiveDefinite):
            cholesky_lower(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_asymmetric(self):
        """Test an asymmetric matrix."""
        with pytest.raises(NotSymmetric):
            cholesky_lower(np.array([[2.0, 1.0], [0.0, 2.0]]))

    def test_non_square(self):
        """Test a non-square matrix."""
        with pytest.raises(ShapeMismatch):
            cholesky_lower(np.ones((2, 3)))

    def test_reconstructs_random_spd(self):
        """Test that the factor rebuilds random SPD matrices."""
        rng = np.random.default_rng(11)
        for _ in range(100):
            m = int(rng.integers(1, 7))
            G = rng.standard_normal((m, m))
            S = G @ G.T + m * np.eye(m)
            P = cholesky_lower(S)

            assert np.all(np.triu(P, k=1) == 0.0)
            assert np.all(np.diag(P) > 0)
            assert np.linalg.norm(P @ P.T - S) <= 1e-12 * np.linalg.norm(S)

    def test_log_det(self):
        """Test the log determinant from the factor."""
        S = np.array([[4.0, 2.0], [2.0, 3.0]])

        assert abs(log_det_spd(S) - np.log(8.0)) < 1e-12


class TestSpectralRadius:
    """Tests for the largest eigenvalue modulus."""

    def test_zero_matrix(self):
        """Test the radius of the zero matrix."""
        assert spectral_radius(np.zeros((3, 3))) == 0.0

    def test_diagonal(self):
        """Test the radius of a diagonal matrix."""
        assert abs(spectral_radius(np.diag([0.5, -0.9])) - 0.9) < 1e-15

    def test_complex_pair(self):
        """Test a rotation with complex eigenvalues."""
        assert abs(spectral_radius(np.array([[0.0, 1.0], [-0.81, 0.0]])) - 0.9) < 1e-8

    def test_triangular_reads_diagonal(self):
        """Test that a triangular radius comes from its diagonal."""
        M = np.array([[0.3, 5.0, -2.0], [0.0, -0.7, 1.0], [0.0, 0.0, 0.1]])

        assert abs(spectral_radius(M) - 0.7) < 1e-10

    def test_scales_linearly(self):
        """Test scaling the matrix scales the radius."""
        rng = np.random.default_rng(3)
        M = rng.standard_normal((4, 4))

        np.testing.assert_allclose(spectral_radius(2.5 * M), 2.5 * spectral_radius(M), rtol=1e-10)
