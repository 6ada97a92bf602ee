"""Centering, sample moments, least squares, logistic regression and deviance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import CenteringStats, ExponentialFamily
from .errors import DegenerateTarget, InsufficientSamples, InvalidData, SingularDesign

__all__ = [
    "FitResult",
    "SINGULAR_CUTOFF",
    "center_columns",
    "sample_variance",
    "sample_covariance",
    "ols_fit",
    "r2_score",
    "logistic_fit",
    "accuracy",
    "scaled_deviance_gap",
]

#: Relative cutoff below which a Gram matrix counts as singular.
SINGULAR_CUTOFF = 1e-12

_RIDGE = 1e-8
_MAX_ITER = 100
_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FitResult:
    """Coefficients of an intercept-free linear predictor.

    ``residual_variance`` is ``SS_res / (n - k)`` for least squares and NaN
    for logistic fits, where it has no meaning.
    """

    coefficients: np.ndarray
    residual_variance: float
    converged: bool = True
    n_iter: int = 0

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Linear predictor ``X @ coefficients``."""
        return np.asarray(X, dtype=float) @ self.coefficients

    def predict_class(self, X: np.ndarray) -> np.ndarray:
        """Class labels from the sign of the linear predictor (0 maps to 1)."""
        return (self.predict(X) >= 0).astype(float)


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidData(f"expected a matrix, got shape {X.shape}")
    return X


def _as_vector(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise InvalidData(f"{name} must be one-dimensional, got shape {v.shape}")
    return v


def center_columns(data) -> tuple[np.ndarray, CenteringStats]:
    """Subtract column means.

    >>> centered, stats = center_columns([[1.0], [2.0], [3.0]])
    >>> centered.ravel().tolist(), stats.column_means.tolist()
    ([-1.0, 0.0, 1.0], [2.0])
    """
    X = _as_matrix(data)
    if X.shape[0] < 1:
        raise InsufficientSamples("cannot center an empty matrix")
    if not np.isfinite(X).all():
        raise InvalidData("cannot center non-finite data")
    means = X.mean(axis=0)
    return X - means, CenteringStats(means)


def sample_variance(v) -> float:
    """Unbiased sample variance (divisor ``n - 1``)."""
    v = _as_vector(v)
    if v.size < 2:
        raise InsufficientSamples(f"variance needs at least 2 samples, got {v.size}")
    return float(np.var(v, ddof=1))


def sample_covariance(a, b) -> float:
    """Unbiased sample covariance (divisor ``n - 1``)."""
    a, b = _as_vector(a, "a"), _as_vector(b, "b")
    if a.shape != b.shape:
        raise InvalidData(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise InsufficientSamples(f"covariance needs at least 2 samples, got {a.size}")
    return float(np.dot(a - a.mean(), b - b.mean()) / (a.size - 1))


def gram_is_singular(G: np.ndarray) -> bool:
    """Whether a Gram matrix is singular relative to its own scale.

    The matrix is normalized to unit diagonal (a correlation-like matrix whose
    determinant is at most 1 by Hadamard's inequality) and declared singular
    when its smallest eigenvalue is at most :data:`SINGULAR_CUTOFF`. For two
    columns that is ``1 - |rho| <= 1e-12``, the same as the determinant test
    up to a factor of two, but unlike the determinant it does not shrink
    geometrically with the number of columns.
    """
    diag = np.diag(G)
    if np.any(diag <= 0):
        return True
    s = 1.0 / np.sqrt(diag)
    C = G * s[:, None] * s[None, :]
    return bool(np.linalg.eigvalsh(C)[0] <= SINGULAR_CUTOFF)


def ols_fit(X, y) -> FitResult:
    """Intercept-free least squares on centered data.

    Raises
    ------
    InsufficientSamples
        If ``n <= k``.
    SingularDesign
        If the Gram matrix is singular (see :func:`gram_is_singular`).
    """
    X = _as_matrix(X)
    y = _as_vector(y, "y")
    n, k = X.shape
    if y.shape[0] != n:
        raise InvalidData(f"X has {n} rows but y has {y.shape[0]}")
    if n <= k:
        raise InsufficientSamples(f"need more samples than columns, got n={n}, k={k}")
    if gram_is_singular(X.T @ X):
        raise SingularDesign(f"Gram matrix of {k} columns is singular")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return FitResult(coef, float(resid @ resid / (n - k)))


def r2_score(y, y_hat) -> float:
    """Coefficient of determination ``1 - SS_res / SS_tot``."""
    y, y_hat = _as_vector(y, "y"), _as_vector(y_hat, "y_hat")
    if y.shape != y_hat.shape:
        raise InvalidData(f"length mismatch: {y.size} vs {y_hat.size}")
    if y.size < 2:
        raise InsufficientSamples("R2 needs at least 2 samples")
    dev = y - y.mean()
    ss_tot = float(dev @ dev)
    if ss_tot <= (1e-14 * max(1.0, float(np.abs(y).max()))) ** 2 * y.size:
        raise DegenerateTarget("target has zero variance")
    resid = y - y_hat
    return 1.0 - float(resid @ resid) / ss_tot


def logistic_fit(X, y) -> FitResult:
    """Intercept-free logistic regression by IRLS.

    A ridge of ``1e-8`` keeps the Newton system solvable on separable data;
    after 100 iterations without the largest coefficient step dropping below
    ``1e-8`` the last iterate is returned with ``converged=False``.
    """
    X = _as_matrix(X)
    y = _as_vector(y, "y")
    n, k = X.shape
    if y.shape[0] != n:
        raise InvalidData(f"X has {n} rows but y has {y.shape[0]}")
    if not np.isin(y, (0.0, 1.0)).all():
        raise InvalidData("logistic target must take values in {0, 1}")
    if y.min() == y.max():
        raise DegenerateTarget("logistic target contains a single class")
    beta = np.zeros(k)
    eye = np.eye(k)
    for it in range(1, _MAX_ITER + 1):
        mu = expit(X @ beta)
        w = mu * (1.0 - mu)
        hess = (X * w[:, None]).T @ X + _RIDGE * eye
        grad = X.T @ (y - mu) - _RIDGE * beta
        step = np.linalg.solve(hess, grad)
        beta = beta + step
        if np.max(np.abs(step)) < _TOL:
            return FitResult(beta, float("nan"), converged=True, n_iter=it)
    return FitResult(beta, float("nan"), converged=False, n_iter=_MAX_ITER)


def accuracy(y, y_hat_class) -> float:
    """Fraction of positions where the two label vectors agree."""
    y, y_hat = _as_vector(y, "y"), _as_vector(y_hat_class, "y_hat_class")
    if y.shape != y_hat.shape:
        raise InvalidData(f"length mismatch: {y.size} vs {y_hat.size}")
    if y.size == 0:
        raise InsufficientSamples("accuracy of an empty vector")
    return float(np.mean(y == y_hat))


def scaled_deviance_gap(family: ExponentialFamily, theta_a, theta_b, y) -> float:
    """Mean of ``D*(theta, theta_a) - D*(theta, theta_b)`` over the samples.

    With ``D*(theta, t) = (2/phi) * (y*(theta - t) - (b(theta) - b(t)))`` the
    true parameter cancels, leaving
    ``(2/phi) * mean(y*(theta_b - theta_a) - (b(theta_b) - b(theta_a)))``.
    The expression is written so that swapping the arguments negates it
    exactly in floating point.
    """
    ta, tb, y = (_as_vector(v, name) for v, name in ((theta_a, "theta_a"), (theta_b, "theta_b"), (y, "y")))
    if not (ta.shape == tb.shape == y.shape):
        raise InvalidData("theta_a, theta_b and y must have equal lengths")
    per_sample = y * (tb - ta) - (family.b(tb) - family.b(ta))
    return float(2.0 / family.scale_phi * per_sample.mean())
