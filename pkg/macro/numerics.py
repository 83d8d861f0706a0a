# macro/numerics.py
"""
Dense Linear Algebra

The three primitives the engine needs, plus a log-determinant helper:
- least_squares: multi-response least squares via a QR factorization
- cholesky_lower: lower Cholesky factor with symmetry and definiteness checks
- spectral_radius: largest eigenvalue modulus
- log_det_spd: log-determinant of a symmetric positive definite matrix

All numerics are float64. Inputs are never modified.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from macro.errors import (
    DomainError,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
    RankDeficient,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-10


def _as_matrix(name: str, data: np.ndarray) -> np.ndarray:
    matrix = np.asarray(data, dtype=np.float64)
    if matrix.ndim != 2:
        raise ShapeMismatch(
            f"{name} must be two-dimensional, got shape {matrix.shape}",
            details={"argument": name, "shape": list(matrix.shape)},
        )
    if not np.all(np.isfinite(matrix)):
        raise DomainError(f"{name} contains non-finite entries", details={"argument": name})
    return matrix


def _as_square(name: str, data: np.ndarray) -> np.ndarray:
    matrix = _as_matrix(name, data)
    if matrix.shape[0] != matrix.shape[1]:
        raise ShapeMismatch(
            f"{name} must be square, got shape {matrix.shape}",
            details={"argument": name, "shape": list(matrix.shape)},
        )
    return matrix


def least_squares(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """
    Minimize ||Y - XB|| over B using the economic QR factorization of X.

    Each column of Y is solved against the same triangular factor; the
    normal equations are never formed.

    Args:
        X: Regressors, shape (T, k).
        Y: Responses, shape (T, m) or (T,).

    Returns:
        B with shape (k, m), or (k,) when Y is one-dimensional.

    Raises:
        ShapeMismatch: X and Y disagree on the row count.
        RankDeficient: smallest |R_ii| is below 1e-10 times the largest.
    """
    X = _as_matrix("X", X)
    Y_in = np.asarray(Y, dtype=np.float64)
    vector_response = Y_in.ndim == 1
    Y = _as_matrix("Y", Y_in[:, None] if vector_response else Y_in)

    T, k = X.shape
    if Y.shape[0] != T:
        raise ShapeMismatch(
            f"X has {T} rows but Y has {Y.shape[0]}",
            details={"x_rows": T, "y_rows": Y.shape[0]},
        )
    if T < k:
        raise RankDeficient(
            f"{T} observations cannot identify {k} coefficients",
            details={"rows": T, "columns": k, "tolerance": RANK_TOLERANCE},
        )

    Q, R = scipy.linalg.qr(X, mode="economic")
    diagonal = np.abs(np.diag(R))
    largest = float(diagonal.max()) if diagonal.size else 0.0
    smallest = float(diagonal.min()) if diagonal.size else 0.0
    if largest == 0.0 or smallest < RANK_TOLERANCE * largest:
        raise RankDeficient(
            f"Regressor matrix is rank deficient: smallest |R_ii| = {smallest:.3e} "
            f"is below {RANK_TOLERANCE:.0e} x largest ({largest:.3e})",
            details={"smallest": smallest, "largest": largest, "tolerance": RANK_TOLERANCE},
        )

    QtY = Q.T @ Y
    B = np.empty((k, Y.shape[1]))
    for column in range(Y.shape[1]):
        B[:, column] = scipy.linalg.solve_triangular(R, QtY[:, column], lower=False)

    return B[:, 0] if vector_response else B


def cholesky_lower(S: np.ndarray) -> np.ndarray:
    """
    Lower-triangular P with positive diagonal such that P @ P.T == S.

    Raises:
        NotSymmetric: max |S - S.T| exceeds 1e-10 x max |S|.
        NotPositiveDefinite: the factorization breaks down.
    """
    S = _as_square("S", S)
    scale = float(np.max(np.abs(S))) if S.size else 0.0
    asymmetry = float(np.max(np.abs(S - S.T))) if S.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(
            f"Matrix is not symmetric (max asymmetry {asymmetry:.3e})",
            details={"asymmetry": asymmetry},
        )

    try:
        P = scipy.linalg.cholesky(0.5 * (S + S.T), lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(
            "Matrix is not positive definite",
            details={"reason": str(exc)},
        ) from exc

    P = np.tril(P)
    if not np.all(np.diag(P) > 0):
        raise NotPositiveDefinite("Cholesky factor has a non-positive pivot")
    return P


def spectral_radius(M: np.ndarray) -> float:
    """
    Largest eigenvalue modulus of a square matrix.

    Eigenvalues come from LAPACK's Hessenberg QR iteration, which gives up
    after 30 sweeps per eigenvalue; that failure surfaces as NoConvergence.
    """
    M = _as_square("M", M)
    if M.size == 0:
        return 0.0
    try:
        eigenvalues = scipy.linalg.eigvals(M, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(
            "Eigenvalue iteration did not converge",
            details={"size": M.shape[0], "reason": str(exc)},
        ) from exc
    return float(np.max(np.abs(eigenvalues)))


def log_det_spd(S: np.ndarray) -> float:
    """log|S| for symmetric positive definite S."""
    P = cholesky_lower(S)
    return float(2.0 * np.sum(np.log(np.diag(P))))
