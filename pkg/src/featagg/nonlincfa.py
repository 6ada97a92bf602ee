"""Greedy aggregation driven by the loss of training R2 (MSE criterion).

Aggregating two inputs into one column trades a little explained variance
for a lower-variance estimator. A candidate joins a cluster when the drop
in training R2, from the two-column model (representative, candidate) to the
one-column model on the aggregated cluster, does not exceed ``epsilon``.
"""

from __future__ import annotations

import numpy as np

from .core import Partition, ReductionConfig
from .errors import InsufficientSamples, SingularDesign
from .estimators import ols_fit, r2_score
from .scan import PairStats, bivariate_fit, bivariate_singular, greedy_scan

__all__ = ["nonlin_threshold", "nonlin_partition", "nonlin_rule"]


def _univariate_r2(col: np.ndarray, y: np.ndarray) -> float:
    if not np.any(col):
        return 0.0
    fit = ols_fit(col[:, None], y)
    return r2_score(y, fit.predict(col[:, None]))


def nonlin_threshold(
    current_rep,
    candidate,
    aggregated,
    y,
    epsilon: float,
) -> float:
    """Admission value ``(R2_bivariate - R2_aggregated) - epsilon``.

    Parameters
    ----------
    current_rep, candidate : array_like, shape (n,)
        Centered representative of the cluster and centered candidate input.
    aggregated : array_like, shape (n,)
        Centered aggregation of the cluster's members together with the
        candidate.
    y : array_like, shape (n,)
        Target; centered internally.
    epsilon : float

    Returns
    -------
    float
        Aggregate iff the value is ``<= 0``. Collinear ``current_rep`` and
        ``candidate`` return ``-inf``: merging them loses nothing.
    """
    rep = np.asarray(current_rep, dtype=float)
    cand = np.asarray(candidate, dtype=float)
    agg = np.asarray(aggregated, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 4:
        raise InsufficientSamples(f"threshold needs at least 4 samples, got {y.size}")
    y = y - y.mean()
    pair = np.column_stack([rep, cand])
    try:
        fit = ols_fit(pair, y)
    except SingularDesign:
        return float("-inf")
    r2_pair = r2_score(y, fit.predict(pair))
    return (r2_pair - _univariate_r2(agg, y)) - epsilon


def nonlin_rule(epsilon: float):
    """Vectorized form of :func:`nonlin_threshold` for :func:`greedy_scan`."""

    def rule(s: PairStats):
        singular = bivariate_singular(s)
        _, _, ssres = bivariate_fit(s)
        r2_pair = 1.0 - ssres / s.sst
        with np.errstate(divide="ignore", invalid="ignore"):
            ss_agg = np.where(s.mm > 0, s.my**2 / s.mm, 0.0)
        r2_agg = 1.0 - (s.yy - ss_agg) / s.sst
        values = np.where(singular, -np.inf, (r2_pair - r2_agg) - epsilon)
        return values, {"r2_bivariate": np.where(singular, np.nan, r2_pair), "r2_aggregated": r2_agg}

    return rule


def nonlin_partition(
    inputs,
    y,
    config: ReductionConfig | float,
    *,
    column_names=(),
    trace: list | None = None,
) -> Partition:
    """Partition centered ``inputs`` by the R2-loss criterion.

    Parameters
    ----------
    inputs : array_like, shape (n, D)
        Centered model inputs (already transformed).
    y : array_like, shape (n,)
        Regression target; centered internally.
    config : ReductionConfig or float
        A bare float is read as ``epsilon`` with Mean aggregation.
    column_names : sequence of str, optional
    trace : list, optional
        Receives one :class:`~featagg.scan.Evaluation` per admission test,
        with the two R2 values in ``details``.

    Returns
    -------
    Partition
    """
    if not isinstance(config, ReductionConfig):
        config = ReductionConfig(float(config))
    X = np.asarray(inputs, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] < 4:
        raise InsufficientSamples(f"need at least 4 samples, got {X.shape[0]}")
    clusters = greedy_scan(X, y - y.mean(), config.aggregation, nonlin_rule(config.epsilon), trace)
    return Partition.build(clusters, X, config.aggregation, config.transform, column_names)
