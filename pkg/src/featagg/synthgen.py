"""Seeded synthetic benchmarks with chained, correlated uniform features.

Feature ``x1`` is uniform on [0, 1]; every later feature mixes a randomly
chosen earlier one with fresh uniform noise,

    x_i = a * x_parent(i) + b * u_i,    u_i ~ U[0, 1],

with ``(a, b) = (0.7, 0.3)`` by default, so all features stay in [0, 1] and
form correlated chains. The target is a weighted sum of the features (or of
their squares) plus Gaussian noise.

Random numbers come from numpy's Philox4x64 counter-based generator. A seed
is expanded with :class:`numpy.random.SeedSequence` into three independent
streams: the weights, the parent choices, and the sample rows. The model
identity therefore does not depend on ``n``, and explicitly supplied weights
do not shift the parent draws.
"""

from __future__ import annotations

import numpy as np

from .core import Dataset, Form, GenerativeSpec, Task
from .errors import InvalidData

__all__ = [
    "make_spec",
    "parents",
    "population_means",
    "population_variances",
    "population_covariance",
    "sample_features",
    "signal",
    "gen_linear",
    "gen_quadratic",
    "generate",
    "to_classification",
]

_WEIGHTS, _PARENTS, _ROWS = range(3)


def _stream(seed: int, which: int) -> np.random.Generator:
    child = np.random.SeedSequence(seed).spawn(3)[which]
    return np.random.Generator(np.random.Philox(child))


def make_spec(
    D: int,
    sigma: float,
    form: Form | str = Form.LINEAR,
    seed: int = 0,
    *,
    standardize_signal: bool = True,
) -> GenerativeSpec:
    """Spec with weights drawn from ``U[0, 1]`` on the seed's weight stream."""
    w = _stream(seed, _WEIGHTS).random(D)
    return GenerativeSpec(D, tuple(w), sigma, Form(form), seed, standardize_signal=standardize_signal)


def parents(spec: GenerativeSpec) -> np.ndarray:
    """0-based parent index of each feature (``-1`` for the first)."""
    rng = _stream(spec.seed, _PARENTS)
    out = np.full(spec.D, -1, dtype=np.int64)
    out[1:] = rng.integers(0, np.arange(1, spec.D))
    return out


def population_means(spec: GenerativeSpec) -> np.ndarray:
    a, b = spec.mixing
    par = parents(spec)
    mu = np.empty(spec.D)
    mu[0] = 0.5
    for i in range(1, spec.D):
        mu[i] = a * mu[par[i]] + 0.5 * b
    return mu


def population_variances(spec: GenerativeSpec) -> np.ndarray:
    a, b = spec.mixing
    par = parents(spec)
    var = np.empty(spec.D)
    var[0] = 1.0 / 12.0
    for i in range(1, spec.D):
        var[i] = a * a * var[par[i]] + b * b / 12.0
    return var


def population_covariance(spec: GenerativeSpec) -> np.ndarray:
    """Exact covariance matrix of the features.

    For ``j < i`` the fresh noise of ``x_i`` is independent of ``x_j``, so
    ``cov(x_i, x_j) = a * cov(x_parent(i), x_j)``.
    """
    a, _ = spec.mixing
    par = parents(spec)
    var = population_variances(spec)
    S = np.diag(var)
    for i in range(1, spec.D):
        S[i, :i] = a * S[par[i], :i]
        S[:i, i] = S[i, :i]
    return S


def sample_features(spec: GenerativeSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    a, b = spec.mixing
    par = parents(spec)
    U = rng.random((n, spec.D))
    X = np.empty_like(U)
    X[:, 0] = U[:, 0]
    for i in range(1, spec.D):
        X[:, i] = a * X[:, par[i]] + b * U[:, i]
    return X


def signal(spec: GenerativeSpec, X: np.ndarray) -> np.ndarray:
    """Noise-free target ``f(X)`` under ``spec``."""
    w = np.asarray(spec.true_weights)
    Z = X
    if spec.standardize_signal:
        Z = (X - population_means(spec)) / np.sqrt(population_variances(spec))
    if spec.form is Form.LINEAR:
        return Z @ w
    f = np.square(Z) @ w
    if spec.standardize_signal:
        f = f - w.sum()
    return f


def _generate(spec: GenerativeSpec, n: int) -> Dataset:
    if n < 3:
        raise InvalidData(f"need at least 3 samples, got {n}")
    rng = _stream(spec.seed, _ROWS)
    X = sample_features(spec, n, rng)
    noise = rng.normal(0.0, 1.0, n) * spec.noise_sigma
    return Dataset(X, signal(spec, X) + noise, Task.REGRESSION)


def gen_linear(spec: GenerativeSpec, n: int) -> Dataset:
    """Regression dataset with target ``f = sum_i w_i x_i`` plus noise."""
    if spec.form is not Form.LINEAR:
        raise InvalidData("gen_linear needs a linear spec")
    return _generate(spec, n)


def gen_quadratic(spec: GenerativeSpec, n: int) -> Dataset:
    """Regression dataset with target ``f = sum_i w_i x_i**2`` plus noise."""
    if spec.form is not Form.QUADRATIC:
        raise InvalidData("gen_quadratic needs a quadratic spec")
    return _generate(spec, n)


def generate(spec: GenerativeSpec, n: int) -> Dataset:
    """Dispatch on ``spec.form``."""
    return _generate(spec, n)


def to_classification(ds: Dataset, threshold: float = 0.0) -> Dataset:
    """Threshold a regression target into classes {0, 1}.

    Targets strictly below ``threshold`` become 0 and the rest 1, so a target
    exactly at the threshold (a measure-zero event) lands in class 1. A
    dataset that is already a classification task is returned unchanged.
    """
    if ds.task is Task.CLASSIFICATION:
        return ds
    labels = (ds.target >= threshold).astype(float)
    return Dataset(ds.features, labels, Task.CLASSIFICATION, ds.column_names)
