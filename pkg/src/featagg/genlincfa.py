"""Greedy aggregation driven by a bound on the expected deviance increase.

For a canonical exponential family, a second-order expansion of ``b`` around
``theta = 0`` bounds the deviance change caused by merging two inputs. The
bound compares

    L = |cov(rep, y)| + |cov(cand, y)| + b''(0)/2 * var(merged)
    R = |cov(merged, y)| + b''(0)/2 * var(rep + cand)

and a candidate joins when ``L - epsilon * R <= 0``. The ratio of the
unknown extreme coefficient magnitudes in the bound is what ``epsilon``
stands in for.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .core import ExponentialFamily, Partition, ReductionConfig
from .errors import ConfigError, InsufficientSamples, InvalidData
from .estimators import sample_covariance, sample_variance
from .scan import PairStats, greedy_scan

__all__ = [
    "make_gaussian_family",
    "make_bernoulli_family",
    "genlin_threshold",
    "genlin_partition",
    "genlin_rule",
]


def make_gaussian_family(scale: float = 1.0) -> ExponentialFamily:
    """Gaussian family: ``b(theta) = theta**2 / 2``, identity link.

    ``scale`` is the dispersion ``phi`` (the noise variance). It cancels in
    the admission rule and only matters for deviance values.
    """
    return ExponentialFamily(
        name="gaussian",
        b=lambda t: 0.5 * np.square(t),
        b_prime=lambda t: np.asarray(t, dtype=float),
        b_second_at_zero=1.0,
        scale_phi=scale,
        link=lambda mu: np.asarray(mu, dtype=float),
        inverse_link=lambda eta: np.asarray(eta, dtype=float),
    )


def _logit(p):
    p = np.asarray(p, dtype=float)
    return np.log(p) - np.log1p(-p)


def make_bernoulli_family() -> ExponentialFamily:
    """Bernoulli family: ``b(theta) = log(1 + exp(theta))``, logit link.

    ``b''(theta) = s(theta) (1 - s(theta))`` with ``s`` the logistic
    function, so ``b''(0) = 1/4``.
    """
    return ExponentialFamily(
        name="bernoulli",
        b=lambda t: np.logaddexp(0.0, t),
        b_prime=expit,
        b_second_at_zero=0.25,
        scale_phi=1.0,
        link=_logit,
        inverse_link=expit,
    )


def get_family(name: str | ExponentialFamily) -> ExponentialFamily:
    if isinstance(name, ExponentialFamily):
        return name
    factories = {"gaussian": make_gaussian_family, "bernoulli": make_bernoulli_family}
    try:
        return factories[name]()
    except KeyError:
        raise ConfigError(f"unknown family {name!r}; known: {sorted(factories)}") from None


def genlin_threshold(
    current_rep,
    candidate,
    members_aggregated,
    sum_col,
    y,
    family: ExponentialFamily,
    epsilon: float,
) -> float:
    """Admission value ``L - epsilon * R`` for one candidate.

    Parameters
    ----------
    current_rep, candidate : array_like, shape (n,)
        Centered cluster representative and candidate input.
    members_aggregated : array_like, shape (n,)
        Centered aggregation of the members together with the candidate.
    sum_col : array_like, shape (n,)
        ``current_rep + candidate``.
    y : array_like, shape (n,)
        Target in the units the comparison should use.
    family : ExponentialFamily
    epsilon : float

    Returns
    -------
    float
        Aggregate iff the value is ``<= 0``.
    """
    cols = [np.asarray(c, dtype=float) for c in (current_rep, candidate, members_aggregated, sum_col, y)]
    n = cols[-1].size
    if any(c.shape != (n,) for c in cols):
        raise InvalidData("all columns must be vectors of the same length")
    rep, cand, merged, summed, y = cols
    half_b2 = 0.5 * family.b_second_at_zero
    L = abs(sample_covariance(rep, y)) + abs(sample_covariance(cand, y)) + half_b2 * sample_variance(merged)
    R = abs(sample_covariance(merged, y)) + half_b2 * sample_variance(summed)
    return L - epsilon * R


def genlin_rule(epsilon: float, b_second: float):
    """Vectorized form of :func:`genlin_threshold` for :func:`greedy_scan`."""
    half_b2 = 0.5 * b_second

    def rule(s: PairStats):
        dof = s.n - 1
        L = (abs(s.ry) + np.abs(s.cy) + half_b2 * s.mm) / dof
        R = (np.abs(s.my) + half_b2 * (s.rr + 2.0 * s.rc + s.cc)) / dof
        return L - epsilon * R, {"L": L, "R": R}

    return rule


def genlin_partition(
    inputs,
    y,
    config: ReductionConfig,
    *,
    scale_target: bool | None = None,
    column_names=(),
    trace: list | None = None,
) -> Partition:
    """Partition centered ``inputs`` by the deviance-bound criterion.

    Parameters
    ----------
    inputs : array_like, shape (n, D)
        Centered model inputs.
    y : array_like, shape (n,)
        Target; values in {0, 1} for the Bernoulli family.
    config : ReductionConfig
        Must carry a family.
    scale_target : bool, optional
        Divide the centered target by its sample standard deviation before
        scoring. The covariance terms of ``L`` and ``R`` carry the units of
        ``y`` while the variance terms do not, so without this the decision
        for a given ``epsilon`` depends on the unit ``y`` is measured in.
        Defaults to True for the Gaussian family and False otherwise: a
        Bernoulli target already lives on its natural 0/1 scale.
    column_names : sequence of str, optional
    trace : list, optional
        Receives one :class:`~featagg.scan.Evaluation` per admission test.
    """
    if config.family is None:
        raise ConfigError("the deviance criterion needs an exponential family")
    family = config.family
    X = np.asarray(inputs, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {X.shape[0]}")
    if family.name == "bernoulli" and not np.isin(y, (0.0, 1.0)).all():
        raise InvalidData("Bernoulli target must take values in {0, 1}")
    if scale_target is None:
        scale_target = family.name == "gaussian"
    yc = y - y.mean()
    if scale_target:
        sd = yc.std(ddof=1)
        if sd > 0:
            yc = yc / sd
    rule = genlin_rule(config.epsilon, family.b_second_at_zero)
    clusters = greedy_scan(X, yc, config.aggregation, rule, trace)
    return Partition.build(clusters, X, config.aggregation, config.transform, column_names)
