"""Domain types shared across the toolkit.

Everything here is an immutable value object: arrays handed to a constructor
are copied and flagged read-only, so instances can be shared across threads.
Algorithms live in the sibling modules.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, InvalidData

__all__ = [
    "Task",
    "Dataset",
    "CenteringStats",
    "TransformSpec",
    "AggregationSpec",
    "Partition",
    "ExponentialFamily",
    "ReductionConfig",
    "Form",
    "GenerativeSpec",
    "IDENTITY",
    "SQUARE",
    "MEAN",
    "SUM_OF_SQUARES",
    "register_transform",
    "register_aggregation",
    "get_transform",
    "get_aggregation",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


class Task(str, enum.Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix, target vector and task kind.

    Parameters
    ----------
    features : array_like, shape (n, D)
    target : array_like, shape (n,)
        Real values for regression, values in {0, 1} for classification.
    task : Task
    column_names : sequence of str, optional
        Defaults to ``x1 .. xD``.

    Raises
    ------
    InvalidData
        If ``n < 3``, ``D < 1``, shapes disagree, any value is non-finite,
        or a classification target has a value outside {0, 1}.
    """

    features: np.ndarray
    target: np.ndarray
    task: Task = Task.REGRESSION
    column_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.target, dtype=float)
        if X.ndim != 2:
            raise InvalidData(f"features must be 2-D, got shape {X.shape}")
        n, D = X.shape
        if n < 3:
            raise InvalidData(f"need at least 3 samples, got {n}")
        if D < 1:
            raise InvalidData("need at least one feature column")
        if y.shape != (n,):
            raise InvalidData(f"target shape {y.shape} does not match {n} rows")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise InvalidData("features and target must be finite")
        task = Task(self.task)
        if task is Task.CLASSIFICATION and not np.isin(y, (0.0, 1.0)).all():
            raise InvalidData("classification target must take values in {0, 1}")
        names = tuple(self.column_names) or tuple(f"x{i + 1}" for i in range(D))
        if len(names) != D:
            raise InvalidData(f"{len(names)} column names for {D} columns")
        if len(set(names)) != D:
            raise InvalidData("column names must be unique")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "target", _frozen(y))
        object.__setattr__(self, "task", task)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def D(self) -> int:
        return self.features.shape[1]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Dataset restricted to ``rows`` (an index array)."""
        return Dataset(self.features[rows], self.target[rows], self.task, self.column_names)


@dataclass(frozen=True, eq=False)
class CenteringStats:
    """Column means computed on training data, reused on evaluation data."""

    column_means: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "column_means", _frozen(np.atleast_1d(self.column_means)))

    def apply(self, data: np.ndarray) -> np.ndarray:
        return np.asarray(data, dtype=float) - self.column_means


# ---------------------------------------------------------------------------
# Input transforms and aggregation functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformSpec:
    """A column-wise map from raw features to model inputs."""

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.asarray(self.func(X), dtype=float)
        if out.shape != X.shape:
            raise InvalidData(f"transform {self.name!r} changed shape {X.shape} -> {out.shape}")
        return out


@dataclass(frozen=True)
class AggregationSpec:
    """Maps the member columns of a cluster to one representative column.

    ``func`` receives an ``(n, k)`` matrix and returns ``n`` values.

    Aggregations of the form ``scale(k) * sum_p contribution(x_p)`` may also
    supply ``contribution`` (elementwise) and ``scale``; the greedy scans use
    them to score every candidate of a cluster in one matrix product instead
    of re-aggregating column by column.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    contribution: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, repr=False, compare=False
    )
    scale: Callable[[int], float] | None = field(default=None, repr=False, compare=False)

    @property
    def decomposable(self) -> bool:
        return self.contribution is not None and self.scale is not None

    def aggregate(self, members: np.ndarray) -> np.ndarray:
        members = np.asarray(members, dtype=float)
        if members.ndim == 1:
            members = members[:, None]
        if members.shape[1] == 0:
            raise InvalidData("cannot aggregate an empty cluster")
        out = np.asarray(self.func(members), dtype=float).reshape(-1)
        if out.shape[0] != members.shape[0]:
            raise InvalidData(f"aggregation {self.name!r} returned {out.shape[0]} rows")
        return out


def _identity(X: np.ndarray) -> np.ndarray:
    return X.copy()


IDENTITY = TransformSpec("identity", _identity)
SQUARE = TransformSpec("square", np.square)
MEAN = AggregationSpec(
    "mean",
    lambda M: M.mean(axis=1),
    contribution=_identity,
    scale=lambda k: 1.0 / k,
)
SUM_OF_SQUARES = AggregationSpec(
    "sum_of_squares",
    lambda M: np.square(M).sum(axis=1),
    contribution=np.square,
    scale=lambda k: 1.0,
)

_TRANSFORMS: dict[str, TransformSpec] = {t.name: t for t in (IDENTITY, SQUARE)}
_AGGREGATIONS: dict[str, AggregationSpec] = {a.name: a for a in (MEAN, SUM_OF_SQUARES)}


def register_transform(name: str, func: Callable[[np.ndarray], np.ndarray]) -> TransformSpec:
    """Register a custom column-wise transform under ``name`` and return it."""
    if name in _TRANSFORMS:
        raise ConfigError(f"transform {name!r} is already registered")
    spec = TransformSpec(name, func)
    _TRANSFORMS[name] = spec
    return spec


def register_aggregation(
    name: str,
    func: Callable[[np.ndarray], np.ndarray],
    *,
    contribution: Callable[[np.ndarray], np.ndarray] | None = None,
    scale: Callable[[int], float] | None = None,
) -> AggregationSpec:
    """Register a custom aggregation under ``name`` and return it."""
    if name in _AGGREGATIONS:
        raise ConfigError(f"aggregation {name!r} is already registered")
    spec = AggregationSpec(name, func, contribution, scale)
    _AGGREGATIONS[name] = spec
    return spec


def get_transform(name: str | TransformSpec) -> TransformSpec:
    if isinstance(name, TransformSpec):
        return name
    try:
        return _TRANSFORMS[name]
    except KeyError:
        raise ConfigError(f"unknown transform {name!r}; known: {sorted(_TRANSFORMS)}") from None


def get_aggregation(name: str | AggregationSpec) -> AggregationSpec:
    if isinstance(name, AggregationSpec):
        return name
    try:
        return _AGGREGATIONS[name]
    except KeyError:
        raise ConfigError(
            f"unknown aggregation {name!r}; known: {sorted(_AGGREGATIONS)}"
        ) from None


# ---------------------------------------------------------------------------
# Partition
# ---------------------------------------------------------------------------


def _aggregate_clusters(
    inputs: np.ndarray, clusters: Sequence[Sequence[int]], aggregation: AggregationSpec
) -> np.ndarray:
    cols = [aggregation.aggregate(inputs[:, list(c)]) for c in clusters]
    return np.column_stack(cols) if cols else np.empty((inputs.shape[0], 0))


@dataclass(frozen=True, eq=False)
class Partition:
    """Ordered disjoint clusters of input indices plus their representatives.

    Clusters hold 0-based column indices. ``representatives`` is the
    ``(n, d)`` matrix of aggregated training columns, each re-centered to mean
    zero; the subtracted means are kept in ``representative_means`` so that
    :meth:`reduce` maps new data consistently.
    """

    clusters: tuple[tuple[int, ...], ...]
    representatives: np.ndarray
    representative_means: np.ndarray
    aggregation: AggregationSpec = MEAN
    transform: TransformSpec = IDENTITY
    column_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        clusters = tuple(tuple(int(i) for i in c) for c in self.clusters)
        reps = np.asarray(self.representatives, dtype=float)
        flat = [i for c in clusters for i in c]
        D = len(flat)
        if any(len(c) == 0 for c in clusters):
            raise InvalidData("clusters must be non-empty")
        if sorted(flat) != list(range(D)):
            raise InvalidData("clusters must be disjoint and cover every input exactly once")
        if reps.ndim != 2 or reps.shape[1] != len(clusters):
            raise InvalidData(f"representatives shape {reps.shape} does not match {len(clusters)} clusters")
        names = tuple(self.column_names) or tuple(f"x{i + 1}" for i in range(D))
        if len(names) != D:
            raise InvalidData(f"{len(names)} column names for {D} inputs")
        object.__setattr__(self, "clusters", clusters)
        object.__setattr__(self, "representatives", _frozen(reps))
        object.__setattr__(self, "representative_means", _frozen(self.representative_means))
        object.__setattr__(self, "column_names", names)

    @classmethod
    def build(
        cls,
        clusters: Sequence[Sequence[int]],
        inputs: np.ndarray,
        aggregation: AggregationSpec = MEAN,
        transform: TransformSpec = IDENTITY,
        column_names: Sequence[str] = (),
    ) -> "Partition":
        """Aggregate ``inputs`` over ``clusters`` and center the result."""
        inputs = np.asarray(inputs, dtype=float)
        raw = _aggregate_clusters(inputs, clusters, aggregation)
        means = raw.mean(axis=0)
        return cls(tuple(map(tuple, clusters)), raw - means, means, aggregation, transform, tuple(column_names))

    @property
    def d(self) -> int:
        return len(self.clusters)

    @property
    def D(self) -> int:
        return len(self.column_names)

    def reduce(self, inputs: np.ndarray) -> np.ndarray:
        """Aggregate new rows with the training-mean offsets of this partition."""
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim != 2 or inputs.shape[1] != self.D:
            raise InvalidData(f"expected {self.D} input columns, got shape {inputs.shape}")
        return _aggregate_clusters(inputs, self.clusters, self.aggregation) - self.representative_means

    def to_dict(self) -> dict:
        return {
            "clusters": [[self.column_names[i] for i in c] for c in self.clusters],
            "aggregation": self.aggregation.name,
            "transform": self.transform.name,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(
        cls, obj: Mapping, inputs: np.ndarray, column_names: Sequence[str]
    ) -> "Partition":
        """Rebuild a partition against ``inputs`` whose columns are ``column_names``.

        Clusters are matched by name, so the column order of ``inputs`` may
        differ from the one the partition was created with; the partition keeps
        the order of ``column_names``.
        """
        unknown = set(obj) - {"clusters", "aggregation", "transform"}
        if unknown:
            raise ConfigError(f"unknown partition keys: {sorted(unknown)}")
        try:
            named = obj["clusters"]
            aggregation = get_aggregation(obj["aggregation"])
            transform = get_transform(obj["transform"])
        except KeyError as exc:
            raise ConfigError(f"partition is missing key {exc.args[0]!r}") from None
        position = {name: i for i, name in enumerate(column_names)}
        try:
            clusters = [[position[name] for name in c] for c in named]
        except KeyError as exc:
            raise InvalidData(f"partition refers to unknown column {exc.args[0]!r}") from None
        return cls.build(clusters, inputs, aggregation, transform, column_names)

    @classmethod
    def from_json(cls, text: str, inputs: np.ndarray, column_names: Sequence[str]) -> "Partition":
        return cls.from_dict(json.loads(text), inputs, column_names)


# ---------------------------------------------------------------------------
# Exponential families, configs, generative models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentialFamily:
    """Canonical exponential family ``exp((y*theta - b(theta)) / phi) + c(y, phi)``.

    The normalizer ``c`` never enters a deviance difference and is omitted.
    """

    name: str
    b: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    b_prime: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    b_second_at_zero: float = 1.0
    scale_phi: float = 1.0
    link: Callable[[np.ndarray], np.ndarray] = field(default=np.asarray, repr=False, compare=False)
    inverse_link: Callable[[np.ndarray], np.ndarray] = field(default=np.asarray, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.b_second_at_zero > 0:
            raise InvalidData("b''(0) must be positive")
        if not (self.scale_phi > 0 and math.isfinite(self.scale_phi)):
            raise InvalidData("scale phi must be a positive finite number")


@dataclass(frozen=True)
class ReductionConfig:
    """Hyperparameters of one reduction run."""

    epsilon: float
    transform: TransformSpec = IDENTITY
    aggregation: AggregationSpec = MEAN
    family: ExponentialFamily | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.epsilon):
            raise ConfigError(f"epsilon must be finite, got {self.epsilon}")
        object.__setattr__(self, "transform", get_transform(self.transform))
        object.__setattr__(self, "aggregation", get_aggregation(self.aggregation))


class Form(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class GenerativeSpec:
    """Ground-truth model for the synthetic benchmarks.

    Features follow ``x1 ~ U[0,1]`` and ``x_i = a*x_parent + b*u`` with
    ``mixing = (a, b)``. The signal is ``sum w_i g(x_i)`` with ``g`` the
    identity (linear form) or the square (quadratic form).

    With ``standardize_signal`` (the default) each ``x_i`` entering the signal
    is first replaced by its population z-score, and the quadratic signal is
    shifted to population mean zero. Otherwise the raw ``x_i`` are used.
    """

    D: int
    true_weights: tuple[float, ...]
    noise_sigma: float
    form: Form = Form.LINEAR
    seed: int = 0
    mixing: tuple[float, float] = (0.7, 0.3)
    standardize_signal: bool = True

    def __post_init__(self) -> None:
        w = tuple(float(v) for v in self.true_weights)
        if self.D < 1 or len(w) != self.D:
            raise ConfigError(f"need D >= 1 weights, got D={self.D} and {len(w)} weights")
        if not all(math.isfinite(v) for v in w):
            raise ConfigError("true weights must be finite")
        if not (self.noise_sigma >= 0 and math.isfinite(self.noise_sigma)):
            raise ConfigError(f"noise sigma must be finite and >= 0, got {self.noise_sigma}")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        object.__setattr__(self, "true_weights", w)
        object.__setattr__(self, "form", Form(self.form))
        object.__setattr__(self, "mixing", tuple(float(m) for m in self.mixing))
