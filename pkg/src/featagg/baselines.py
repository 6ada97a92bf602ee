"""Reference methods: wrapper forward selection and correlation-threshold LinCFA."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import MEAN, Partition, Task
from .errors import DegenerateTarget, InsufficientSamples, InvalidData, SingularDesign
from .estimators import accuracy, logistic_fit, ols_fit, r2_score
from .scan import PairStats, bivariate_fit, bivariate_singular, greedy_scan

__all__ = ["forward_selection", "lincfa_partition", "lincfa_rule"]


def _training_score(X: np.ndarray, y: np.ndarray, task: Task) -> float | None:
    """Training score of the downstream model, or None when the fit is singular."""
    try:
        if task is Task.REGRESSION:
            fit = ols_fit(X, y)
            return r2_score(y, fit.predict(X))
        fit = logistic_fit(X, y)
        return accuracy(y, fit.predict_class(X))
    except SingularDesign:
        return None


def forward_selection(
    X,
    y,
    k_max: int,
    task: Task | str = Task.REGRESSION,
    *,
    n_jobs: int = 1,
) -> list[tuple[int, float]]:
    """Greedy wrapper selection scored on training data.

    At each step every unselected column is added in turn, the downstream
    model (least squares for regression, logistic regression for
    classification) is refitted, and the column with the best training score
    is kept. Ties go to the lowest index; candidates whose design is singular
    are skipped. Selection stops early when no candidate can be fitted.

    Parameters
    ----------
    X : array_like, shape (n, D)
        Centered inputs.
    y : array_like, shape (n,)
        Target (centered internally for regression).
    k_max : int
        Maximum number of selected columns, at most ``D``.
    task : Task or str
    n_jobs : int
        Candidates of one step are scored on this many threads. The result
        does not depend on it.

    Returns
    -------
    list of (int, float)
        Selected 0-based column index and the training score after adding it.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    task = Task(task)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise InvalidData(f"incompatible shapes {X.shape} and {y.shape}")
    D = X.shape[1]
    if not 0 <= k_max <= D:
        raise InvalidData(f"k_max must lie in [0, {D}], got {k_max}")
    if task is Task.REGRESSION:
        y = y - y.mean()
    elif y.min() == y.max():
        raise DegenerateTarget("classification target contains a single class")
    if X.shape[0] <= k_max:
        raise InsufficientSamples(f"need more than {k_max} samples")

    selected: list[int] = []
    path: list[tuple[int, float]] = []
    pool = ThreadPoolExecutor(n_jobs) if n_jobs > 1 else None
    try:
        for _ in range(k_max):
            cands = [j for j in range(D) if j not in selected]

            def score(j: int) -> float | None:
                return _training_score(X[:, selected + [j]], y, task)

            scores = list(pool.map(score, cands)) if pool else [score(j) for j in cands]
            best, best_score = None, -np.inf
            for j, s in zip(cands, scores):
                if s is not None and s > best_score:
                    best, best_score = j, s
            if best is None:
                break
            selected.append(best)
            path.append((best, float(best_score)))
    finally:
        if pool:
            pool.shutdown()
    return path


def lincfa_rule(s: PairStats):
    """Correlation condition ``rho >= 1 - 2 s2 / ((n - 1) (w1 - w2)**2)``.

    ``w1, w2`` are the two-column least-squares coefficients and ``s2`` its
    residual variance. Returns ``threshold - rho`` (admit iff ``<= 0``).
    Equal coefficients make the threshold ``-inf``; collinear pairs are
    admitted when positively correlated.
    """
    n = s.n
    singular = bivariate_singular(s)
    w1, w2, ssres = bivariate_fit(s)
    s2 = np.maximum(ssres, 0.0) / (n - 2)
    diff = w1 - w2
    equal = np.abs(diff) <= 1e-12 * np.maximum(1.0, np.maximum(np.abs(w1), np.abs(w2)))
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = s.rc / np.sqrt(s.rr * s.cc)
        threshold = 1.0 - 2.0 * s2 / ((n - 1) * diff**2)
    values = np.where(equal, -np.inf, threshold - rho)
    values = np.where(singular, np.where(s.rc > 0, -np.inf, np.inf), values)
    return values, {"rho": rho, "threshold": np.where(equal, -np.inf, threshold)}


def lincfa_partition(X, y, *, column_names=(), trace: list | None = None) -> Partition:
    """Greedy Mean aggregation by the two-feature correlation condition.

    Same scan as the R2 criterion, no hyperparameter. The unknown noise
    variance of the condition is replaced by the residual variance of the
    two-column fit.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {X.shape[0]}")
    clusters = greedy_scan(X, y - y.mean(), MEAN, lincfa_rule, trace)
    return Partition.build(clusters, X, MEAN, column_names=column_names)
