"""Closed-form bias/variance gaps of aggregation and their Monte Carlo checks.

Two intercept-free least-squares models are compared on two zero-mean
inputs ``phi1, phi2``: the *bivariate* model on both inputs, and the
*aggregated* model on ``h = h(phi1, phi2)``. With ``y = f + noise``,
``var(noise) = sigma2`` and training size ``n``:

* the variance term drops by ``sigma2 / (n - 1)`` when aggregating
  (asymptotically in ``n``);
* the squared-bias term grows by the difference between the signal variance
  explained linearly by ``(phi1, phi2)`` and by ``h`` alone;
* for Gaussian targets the expected scaled-deviance change equals
  ``(delta_bias - delta_var) / phi``.

The Monte Carlo side uses two-input instances of the synthetic generator,
whose population moments are computed exactly by Gauss-Legendre quadrature
(every quantity involved is a polynomial in two independent uniforms).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .core import MEAN, IDENTITY, AggregationSpec, Form, GenerativeSpec, TransformSpec
from .errors import ConfigError, InvalidMoments
from .estimators import ols_fit, r2_score, scaled_deviance_gap, sample_variance
from .genlincfa import make_gaussian_family

__all__ = [
    "Model",
    "PopulationMoments",
    "EmpiricalMoments",
    "AsymptoticGaps",
    "MSEDecomposition",
    "MSEGap",
    "DevianceCheck",
    "eval_asymptotic_gaps",
    "eval_finite_sample_var_gap",
    "two_input_moments",
    "mc_mse_decomposition",
    "mc_mse_gap",
    "mc_finite_sample_var_gap",
    "check_gaussian_deviance_mse",
    "r2_rule_consistency",
    "run_suite",
    "SUITES",
]

_TOL = 1e-12


class Model(str, enum.Enum):
    BIVARIATE = "bivariate"
    AGGREGATED = "aggregated"


@dataclass(frozen=True)
class PopulationMoments:
    """Second moments of ``(phi1, phi2, h, f)`` and the noise variance."""

    sigma2: float
    var_f: float
    var_1: float
    var_2: float
    var_h: float
    cov_12: float
    cov_1f: float
    cov_2f: float
    cov_fh: float

    def validate(self) -> None:
        vals = asdict(self)
        if not all(math.isfinite(v) for v in vals.values()):
            raise InvalidMoments("moments must be finite")
        if self.sigma2 < 0 or self.var_f < 0:
            raise InvalidMoments("variances must be non-negative")
        if min(self.var_1, self.var_2, self.var_h) <= 0:
            raise InvalidMoments("input and aggregate variances must be positive")
        joint = np.array(
            [
                [self.var_1, self.cov_12, self.cov_1f],
                [self.cov_12, self.var_2, self.cov_2f],
                [self.cov_1f, self.cov_2f, self.var_f],
            ]
        )
        scale = np.sqrt(np.maximum(np.diag(joint), _TOL))
        corr = joint / np.outer(scale, scale)
        if np.linalg.eigvalsh(corr)[0] < -1e-9:
            raise InvalidMoments("covariance of (phi1, phi2, f) is not positive semi-definite")
        if self.var_1 * self.var_2 - self.cov_12**2 <= _TOL * self.var_1 * self.var_2:
            raise InvalidMoments("phi1 and phi2 are collinear")
        if self.cov_fh**2 > self.var_f * self.var_h * (1 + 1e-9):
            raise InvalidMoments("|corr(f, h)| exceeds 1")


@dataclass(frozen=True)
class EmpiricalMoments:
    """Training-sample (divisor ``n - 1``) moments of the inputs and the aggregate."""

    var_1: float
    var_2: float
    cov_12: float
    var_h: float

    @classmethod
    def from_columns(cls, phi1, phi2, h, *, known_zero_mean: bool = True) -> "EmpiricalMoments":
        """Moments of training columns.

        With ``known_zero_mean`` the moments are taken about zero (the
        population mean), matching least-squares fits on uncentered columns;
        otherwise about the sample means.
        """
        M = np.vstack([phi1, phi2, h]).astype(float)
        if not known_zero_mean:
            M = M - M.mean(axis=1, keepdims=True)
        S = M @ M.T / (M.shape[1] - 1)
        return cls(float(S[0, 0]), float(S[1, 1]), float(S[0, 1]), float(S[2, 2]))


@dataclass(frozen=True)
class AsymptoticGaps:
    delta_var: float
    delta_bias: float


def eval_asymptotic_gaps(m: PopulationMoments, n: int) -> AsymptoticGaps:
    """Variance decrease and bias increase caused by aggregating two inputs.

    ``delta_var = sigma2 / (n - 1)`` and

    ``delta_bias = -cov(f,h)^2 / var_h + (var_1 cov(2,f)^2 + var_2 cov(1,f)^2
    - 2 cov(1,f) cov(2,f) cov_12) / (var_1 var_2 - cov_12^2)``.
    """
    m.validate()
    if n < 2:
        raise InvalidMoments(f"n must be at least 2, got {n}")
    det = m.var_1 * m.var_2 - m.cov_12**2
    explained_pair = (
        m.var_1 * m.cov_2f**2 + m.var_2 * m.cov_1f**2 - 2.0 * m.cov_1f * m.cov_2f * m.cov_12
    ) / det
    return AsymptoticGaps(m.sigma2 / (n - 1), explained_pair - m.cov_fh**2 / m.var_h)


def eval_finite_sample_var_gap(pop: PopulationMoments, emp: EmpiricalMoments, n: int) -> float:
    """Variance decrease of aggregation for a fixed training design.

    Conditional on the training inputs, the bivariate coefficients have
    covariance ``sigma2 / (n-1) * S^-1`` (``S`` the empirical input
    covariance) and the aggregated coefficient ``sigma2 / ((n-1) s_h^2)``.
    Averaging the prediction variance over population inputs gives

    ``sigma2/(n-1) * [(var_1 s_2^2 + var_2 s_1^2 - 2 cov_12 s_12) / (s_1^2 s_2^2 - s_12^2)
    - var_h / s_h^2]``.
    """
    det = emp.var_1 * emp.var_2 - emp.cov_12**2
    if not (emp.var_1 > 0 and emp.var_2 > 0 and emp.var_h > 0) or det <= _TOL * emp.var_1 * emp.var_2:
        raise InvalidMoments("empirical moment matrix is singular")
    pair = (pop.var_1 * emp.var_2 + pop.var_2 * emp.var_1 - 2.0 * pop.cov_12 * emp.cov_12) / det
    return pop.sigma2 / (n - 1) * (pair - pop.var_h / emp.var_h)


# ---------------------------------------------------------------------------
# Two-input generator instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoInputModel:
    """Population-centered model inputs of a two-feature generator."""

    spec: GenerativeSpec
    transform: TransformSpec = IDENTITY
    aggregation: AggregationSpec = MEAN
    offsets: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def columns(self, U: np.ndarray) -> tuple[np.ndarray, ...]:
        """``(phi1, phi2, h, f)`` from uniforms ``U`` of shape ``(m, 2)``."""
        a, b = self.spec.mixing
        X = np.column_stack([U[:, 0], a * U[:, 0] + b * U[:, 1]])
        var = np.array([1.0 / 12.0, a * a / 12.0 + b * b / 12.0])
        Z = (X - np.array([0.5, 0.5 * a + 0.5 * b])) / np.sqrt(var)
        w = np.asarray(self.spec.true_weights)
        if self.spec.standardize_signal:
            f = Z @ w if self.spec.form is Form.LINEAR else np.square(Z) @ w
        else:
            f = X @ w if self.spec.form is Form.LINEAR else np.square(X) @ w
        phi = self.transform.apply(Z)
        h = self.aggregation.aggregate(phi)
        o = self.offsets
        return phi[:, 0] - o[0], phi[:, 1] - o[1], h - o[2], f - o[3]


def _quadrature(nodes: int = 12) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(nodes)
    t, w = 0.5 * (t + 1.0), 0.5 * w
    U = np.column_stack([np.repeat(t, nodes), np.tile(t, nodes)])
    return U, np.repeat(w, nodes) * np.tile(w, nodes)


def two_input_moments(
    spec: GenerativeSpec,
    transform: TransformSpec = IDENTITY,
    aggregation: AggregationSpec = MEAN,
) -> tuple[PopulationMoments, TwoInputModel]:
    """Exact population moments of a two-feature generator.

    Model inputs are the transformed population z-scores of the features,
    shifted to population mean zero. Returns the moments and the centered
    model used to draw Monte Carlo samples.

    The quadrature is exact for polynomial transforms and aggregations of
    total degree up to 11 in the features, which covers the identity and
    square transforms with mean or sum-of-squares aggregation.
    """
    if spec.D != 2:
        raise ConfigError(f"two-input moments need D = 2, got D = {spec.D}")
    U, w = _quadrature()
    model = TwoInputModel(spec, transform, aggregation)
    cols = model.columns(U)
    means = tuple(float(w @ c) for c in cols)
    model = TwoInputModel(spec, transform, aggregation, means)
    p1, p2, h, f = model.columns(U)

    def cov(a, b):
        return float(w @ (a * b))

    moments = PopulationMoments(
        sigma2=spec.noise_sigma**2,
        var_f=cov(f, f),
        var_1=cov(p1, p1),
        var_2=cov(p2, p2),
        var_h=cov(h, h),
        cov_12=cov(p1, p2),
        cov_1f=cov(p1, f),
        cov_2f=cov(p2, f),
        cov_fh=cov(f, h),
    )
    return moments, model


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _rep_rng(seed: int, r: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed + r))


def _eval_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(7,))))


def _fit_pair(p1, p2, h, y) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of the bivariate and the aggregated model."""
    G = np.array([[p1 @ p1, p1 @ p2], [p1 @ p2, p2 @ p2]])
    w_pair = np.linalg.solve(G, np.array([p1 @ y, p2 @ y]))
    return w_pair, float(h @ y) / float(h @ h)


def _fit_reps(model: TwoInputModel, n: int, reps: int, seed: int, n_jobs: int = 1):
    sigma = model.spec.noise_sigma

    def one(r: int):
        rng = _rep_rng(seed, r)
        p1, p2, h, f = model.columns(rng.random((n, 2)))
        y = f + sigma * rng.standard_normal(n)
        return _fit_pair(p1, p2, h, y)

    results = _map(one, range(reps), n_jobs)
    W = np.array([r[0] for r in results])
    v = np.array([r[1] for r in results])[:, None]
    return W, v


def _map(func: Callable, items, n_jobs: int) -> list:
    if n_jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(n_jobs) as pool:
            return list(pool.map(func, items))
    return [func(i) for i in items]


@dataclass(frozen=True)
class MSEDecomposition:
    """Monte Carlo estimates of the variance and squared-bias terms of the MSE."""

    variance_term: float
    variance_se: float
    bias_term: float
    bias_se: float


@dataclass(frozen=True)
class MSEGap:
    """Paired estimates: variance decrease and bias increase of aggregation."""

    variance_decrease: float
    variance_decrease_se: float
    bias_increase: float
    bias_increase_se: float
    reps: int


@dataclass
class _Terms:
    """Per-replication and per-evaluation-point contributions of one model."""

    var_reps: np.ndarray
    var_points: np.ndarray
    bias_value: float
    bias_jack: np.ndarray
    bias_points: np.ndarray


def _terms(W: np.ndarray, Phi: np.ndarray, f: np.ndarray) -> _Terms:
    """Decompose predictions ``Phi @ W[r]`` of ``reps`` fitted models.

    The variance term is the prediction variance across replications,
    averaged over evaluation points; the bias term is the squared distance
    between the mean prediction and ``f``, debiased by ``variance / reps``.
    Because predictions are linear in the coefficients, both reduce to
    quadratic forms in the coefficient mean and covariance.
    """
    R = W.shape[0]
    wbar = W.mean(axis=0)
    dev = W - wbar
    A = Phi.T @ Phi / Phi.shape[0]
    var_reps = np.einsum("ri,ij,rj->r", dev, A, dev) * R / (R - 1)
    cov_w = dev.T @ dev / (R - 1)
    var_points = np.einsum("ei,ij,ej->e", Phi, cov_w, Phi)
    variance = float(var_reps.mean())
    b = Phi.T @ f / Phi.shape[0]
    c = float(f @ f) / Phi.shape[0]

    def bias_of(w: np.ndarray) -> np.ndarray:
        w = np.atleast_2d(w)
        return np.einsum("ri,ij,rj->r", w, A, w) - 2.0 * w @ b + c

    bias_value = float(bias_of(wbar)[0]) - variance / R
    loo = (R * wbar - W) / (R - 1)
    bias_jack = bias_of(loo) - variance / (R - 1)
    resid = Phi @ wbar - f
    return _Terms(var_reps, var_points, bias_value, bias_jack, np.square(resid))


def _jack_se(values: np.ndarray) -> float:
    R = values.size
    return float(math.sqrt((R - 1) / R * np.sum(np.square(values - values.mean()))))


def _mean_se(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / math.sqrt(values.size))


def _run_mc(spec, n, reps, eval_points, seed, transform, aggregation, n_jobs):
    if reps < 2:
        raise ConfigError("Monte Carlo needs at least 2 replications")
    _, model = two_input_moments(spec, transform, aggregation)
    W, v = _fit_reps(model, n, reps, seed, n_jobs)
    p1, p2, h, f = model.columns(_eval_rng(seed).random((eval_points, 2)))
    pair = _terms(W, np.column_stack([p1, p2]), f)
    single = _terms(v, h[:, None], f)
    return pair, single


def mc_mse_decomposition(
    spec: GenerativeSpec,
    model: Model | str,
    n: int,
    reps: int,
    eval_points: int = 10_000,
    *,
    seed: int = 0,
    transform: TransformSpec = IDENTITY,
    aggregation: AggregationSpec = MEAN,
    n_jobs: int = 1,
) -> MSEDecomposition:
    """Estimate the variance and squared-bias terms of one model's MSE.

    ``reps`` training sets of size ``n`` are drawn (replication ``r`` uses
    seed ``seed + r``), the model is fitted to each, and both terms are
    averaged over one common set of ``eval_points`` evaluation inputs.
    Standard errors combine the replication noise (sample standard error
    for the variance, jackknife for the bias) with the evaluation-point
    noise.
    """
    pair, single = _run_mc(spec, n, reps, eval_points, seed, transform, aggregation, n_jobs)
    t = pair if Model(model) is Model.BIVARIATE else single
    return MSEDecomposition(
        variance_term=float(t.var_reps.mean()),
        variance_se=math.hypot(_mean_se(t.var_reps), _mean_se(t.var_points)),
        bias_term=t.bias_value,
        bias_se=math.hypot(_jack_se(t.bias_jack), _mean_se(t.bias_points)),
    )


def mc_mse_gap(
    spec: GenerativeSpec,
    n: int,
    reps: int,
    eval_points: int = 10_000,
    *,
    seed: int = 0,
    transform: TransformSpec = IDENTITY,
    aggregation: AggregationSpec = MEAN,
    n_jobs: int = 1,
) -> MSEGap:
    """Paired estimate of (bivariate - aggregated) variance and (aggregated - bivariate) bias.

    Both models are fitted on the same training sets and evaluated on the
    same points, so the standard errors are those of the differences.
    """
    pair, single = _run_mc(spec, n, reps, eval_points, seed, transform, aggregation, n_jobs)
    dv = pair.var_reps - single.var_reps
    db_jack = single.bias_jack - pair.bias_jack
    return MSEGap(
        variance_decrease=float(dv.mean()),
        variance_decrease_se=math.hypot(_mean_se(dv), _mean_se(pair.var_points - single.var_points)),
        bias_increase=single.bias_value - pair.bias_value,
        bias_increase_se=math.hypot(_jack_se(db_jack), _mean_se(single.bias_points - pair.bias_points)),
        reps=reps,
    )


@dataclass(frozen=True)
class FiniteSampleCheck:
    formula: float
    estimate: float
    se: float


def mc_finite_sample_var_gap(
    spec: GenerativeSpec,
    n: int,
    reps: int,
    eval_points: int = 10_000,
    *,
    seed: int = 0,
    transform: TransformSpec = IDENTITY,
    aggregation: AggregationSpec = MEAN,
) -> FiniteSampleCheck:
    """Variance decrease for one fixed training design, by redrawing only the noise.

    The training inputs come from seed ``seed``; replication ``r`` redraws
    the noise from seed ``seed + r + 1``. The estimate is compared with
    :func:`eval_finite_sample_var_gap` evaluated at the design's empirical
    moments.
    """
    moments, model = two_input_moments(spec, transform, aggregation)
    p1, p2, h, f = model.columns(_rep_rng(seed, 0).random((n, 2)))
    emp = EmpiricalMoments.from_columns(p1, p2, h)
    sigma = spec.noise_sigma
    W = np.empty((reps, 2))
    v = np.empty((reps, 1))
    for r in range(reps):
        y = f + sigma * _rep_rng(seed, r + 1).standard_normal(n)
        W[r], v[r, 0] = _fit_pair(p1, p2, h, y)
    e1, e2, eh, ef = model.columns(_eval_rng(seed).random((eval_points, 2)))
    pair = _terms(W, np.column_stack([e1, e2]), ef)
    single = _terms(v, eh[:, None], ef)
    dv = pair.var_reps - single.var_reps
    return FiniteSampleCheck(
        formula=eval_finite_sample_var_gap(moments, emp, n),
        estimate=float(dv.mean()),
        se=math.hypot(_mean_se(dv), _mean_se(pair.var_points - single.var_points)),
    )


@dataclass(frozen=True)
class DevianceCheck:
    """Monte Carlo expected scaled-deviance change against its closed form."""

    estimate: float
    se: float
    closed_form: float
    delta_bias: float
    delta_var: float
    phi: float
    reps: int

    @property
    def z(self) -> float:
        return (self.estimate - self.closed_form) / self.se if self.se > 0 else 0.0

    @property
    def ratio(self) -> float:
        return self.estimate / self.closed_form if self.closed_form else float("nan")

    @property
    def passed(self) -> bool:
        return abs(self.estimate - self.closed_form) <= 3.0 * self.se

    def to_dict(self) -> dict:
        return {**asdict(self), "z": self.z, "ratio": self.ratio, "passed": self.passed}


def check_gaussian_deviance_mse(
    spec: GenerativeSpec,
    n: int,
    reps: int,
    *,
    test_points: int = 1_000,
    seed: int = 0,
    compare: tuple[Model | str, Model | str] = (Model.AGGREGATED, Model.BIVARIATE),
    transform: TransformSpec = IDENTITY,
    aggregation: AggregationSpec = MEAN,
) -> DevianceCheck:
    """Expected scaled-deviance change of aggregation under Gaussian noise.

    Each replication draws a training set and a fresh test set, fits both
    models, and evaluates ``scaled_deviance_gap`` between the two models'
    test predictions with dispersion ``phi = sigma^2``. The mean over
    replications is compared with ``(delta_bias - delta_var) / phi`` from
    :func:`eval_asymptotic_gaps` (zero when the compared models coincide).
    """
    if spec.noise_sigma <= 0:
        raise ConfigError("the Gaussian deviance needs noise_sigma > 0")
    a, b = Model(compare[0]), Model(compare[1])
    moments, model = two_input_moments(spec, transform, aggregation)
    gaps = eval_asymptotic_gaps(moments, n)
    phi = spec.noise_sigma**2
    family = make_gaussian_family(phi)
    sigma = spec.noise_sigma
    est = np.empty(reps)
    for r in range(reps):
        rng = _rep_rng(seed, r)
        p1, p2, h, f = model.columns(rng.random((n, 2)))
        w_pair, w_h = _fit_pair(p1, p2, h, f + sigma * rng.standard_normal(n))
        t1, t2, th, tf = model.columns(rng.random((test_points, 2)))
        y_test = tf + sigma * rng.standard_normal(test_points)
        theta = {Model.BIVARIATE: w_pair[0] * t1 + w_pair[1] * t2, Model.AGGREGATED: w_h * th}
        est[r] = scaled_deviance_gap(family, theta[a], theta[b], y_test)
    sign = {(Model.AGGREGATED, Model.BIVARIATE): 1.0, (Model.BIVARIATE, Model.AGGREGATED): -1.0}.get((a, b), 0.0)
    closed = sign * (gaps.delta_bias - gaps.delta_var) / phi
    return DevianceCheck(float(est.mean()), _mean_se(est), closed, gaps.delta_bias, gaps.delta_var, phi, reps)


@dataclass(frozen=True)
class RuleConsistencyCheck:
    """Fraction of replications whose empirical R2 gap exceeds the noise bound."""

    mse_gap: float
    mse_gap_se: float
    fraction: float
    reps: int


def r2_rule_consistency(
    spec: GenerativeSpec,
    n: int,
    reps: int,
    *,
    seed: int = 0,
    test_points: int = 2_000,
) -> RuleConsistencyCheck:
    """Compare the aggregation rule with the measured benefit of aggregating.

    Aggregation pays off when ``sigma^2 / (var_f (n - 1))`` is at least the
    R2 loss (of the noise-free signal ``f``) from the two inputs to their
    aggregate. Per replication this computes the empirical R2 loss on the
    training inputs, the empirical bound with the sample variance of ``f``,
    and the test MSE difference (bivariate minus aggregated). Returns the mean
    MSE difference with its standard error and the fraction of replications
    where the R2 loss exceeds the bound (the rule says: do not aggregate).
    """
    _, model = two_input_moments(spec)
    sigma2 = spec.noise_sigma**2
    exceed = np.empty(reps, dtype=bool)
    mse_gap = np.empty(reps)
    for r in range(reps):
        rng = _rep_rng(seed, r)
        p1, p2, h, f = model.columns(rng.random((n, 2)))
        y = f + spec.noise_sigma * rng.standard_normal(n)
        pair = np.column_stack([p1, p2])
        fc = f - f.mean()
        r2_pair = r2_score(fc, ols_fit(pair, fc).predict(pair))
        r2_h = r2_score(fc, ols_fit(h[:, None], fc).predict(h[:, None]))
        bound = sigma2 / (sample_variance(f) * (n - 1))
        exceed[r] = (r2_pair - r2_h) > bound
        w_pair, w_h = _fit_pair(p1, p2, h, y)
        t1, t2, th, tf = model.columns(rng.random((test_points, 2)))
        mse_pair = np.mean(np.square(tf - w_pair[0] * t1 - w_pair[1] * t2))
        mse_h = np.mean(np.square(tf - w_h * th))
        mse_gap[r] = mse_pair - mse_h
    return RuleConsistencyCheck(float(mse_gap.mean()), _mean_se(mse_gap), float(exceed.mean()), reps)


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------


def _spec(w1: float, w2: float, sigma: float) -> GenerativeSpec:
    return GenerativeSpec(2, (w1, w2), sigma, Form.LINEAR, seed=0)


#: Weight configurations of the two-feature linear instances used by the bias suite.
BIAS_CONFIGS = ((1.0, 0.2), (0.3, 1.5), (1.0, -0.5))


@dataclass
class CheckResult:
    name: str
    value: float
    expected: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)


def _suite_variance(reps: int, seed: int) -> list[CheckResult]:
    n, sigma = 100, 1.0
    gap = mc_mse_gap(_spec(1.0, 0.5, sigma), n, reps, seed=seed)
    expected = sigma**2 / (n - 1)
    rel = abs(gap.variance_decrease - expected) / expected
    return [
        CheckResult(
            "variance_decrease_n100",
            gap.variance_decrease,
            expected,
            0.15,
            rel <= 0.15,
            {"relative_error": rel, "se": gap.variance_decrease_se, "reps": reps},
        )
    ]


def _suite_bias(reps: int, seed: int) -> list[CheckResult]:
    out = []
    n = 2000
    for k, (w1, w2) in enumerate(BIAS_CONFIGS):
        spec = _spec(w1, w2, 1.0)
        moments, _ = two_input_moments(spec)
        expected = eval_asymptotic_gaps(moments, n).delta_bias
        gap = mc_mse_gap(spec, n, reps, seed=seed + 100_000 * k)
        tol = 3.0 * gap.bias_increase_se
        out.append(
            CheckResult(
                f"bias_increase_w{w1:g}_{w2:g}",
                gap.bias_increase,
                expected,
                tol,
                abs(gap.bias_increase - expected) <= tol,
                {"se": gap.bias_increase_se, "reps": reps},
            )
        )
    return out


def _suite_gaussian(reps: int, seed: int) -> list[CheckResult]:
    out = []
    for name, spec in (("equal_weights", _spec(1.0, 1.0, 2.0)), ("generic", _spec(1.0, 0.6, 2.0))):
        chk = check_gaussian_deviance_mse(spec, 500, reps, seed=seed)
        out.append(
            CheckResult(
                f"deviance_gap_{name}",
                chk.estimate,
                chk.closed_form,
                3.0 * chk.se,
                chk.passed,
                chk.to_dict(),
            )
        )
    rng = np.random.Generator(np.random.Philox(seed))
    y, ta, tb = rng.normal(size=(3, 1000))
    phi = 2.5
    dev = scaled_deviance_gap(make_gaussian_family(phi), ta, tb, y)
    direct = (np.mean((y - ta) ** 2) - np.mean((y - tb) ** 2)) / phi
    out.append(CheckResult("deviance_equals_mse_difference", dev, direct, 1e-9, abs(dev - direct) <= 1e-9))
    return out


def _suite_finite(reps: int, seed: int) -> list[CheckResult]:
    chk = mc_finite_sample_var_gap(_spec(1.0, 0.5, 1.0), 50, reps, seed=seed)
    tol = 3.0 * chk.se
    return [
        CheckResult(
            "finite_sample_variance_decrease",
            chk.estimate,
            chk.formula,
            tol,
            abs(chk.estimate - chk.formula) <= tol,
            {"se": chk.se, "reps": reps},
        )
    ]


SUITES: dict[str, Callable[[int, int], list[CheckResult]]] = {
    "variance": _suite_variance,
    "bias": _suite_bias,
    "gaussian-equivalence": _suite_gaussian,
    "finite-sample": _suite_finite,
}


def run_suite(name: str, reps: int, seed: int = 0) -> dict:
    """Run one named suite (or ``"all"``) and return a JSON-ready report."""
    names = list(SUITES) if name == "all" else [name]
    for s in names:
        if s not in SUITES:
            raise ConfigError(f"unknown suite {s!r}; known: {sorted(SUITES) + ['all']}")
    checks = [asdict(c) for s in names for c in SUITES[s](reps, seed)]
    for c in checks:
        c["passed"] = bool(c["passed"])
    return {
        "suites": names,
        "reps": reps,
        "seed": seed,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
