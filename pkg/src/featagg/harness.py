"""Experiment orchestration: configs, CSV I/O, repeated train/test runs, reports."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .baselines import forward_selection, lincfa_partition
from .core import (
    Dataset,
    Form,
    Partition,
    ReductionConfig,
    Task,
    get_aggregation,
    get_transform,
)
from .errors import ConfigError, FeatAggError, InvalidData, ParseError
from .estimators import accuracy, logistic_fit, ols_fit, r2_score
from .genlincfa import genlin_partition, get_family
from .nonlincfa import nonlin_partition
from .synthgen import generate, make_spec, to_classification

__all__ = [
    "ALGORITHMS",
    "CsvSource",
    "SyntheticSource",
    "ExperimentConfig",
    "ExperimentReport",
    "Prepared",
    "load_csv",
    "write_csv",
    "prepare_split",
    "reduce_inputs",
    "run_experiment",
]

ALGORITHMS = ("nonlincfa", "genlincfa", "lincfa", "forward_selection")
_EPSILON_ALGORITHMS = ("nonlincfa", "genlincfa")


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def load_csv(path: str | Path, target_column: str, task: Task | str = Task.REGRESSION) -> Dataset:
    """Read a numeric CSV with a header row.

    The named target column becomes the target; every other column is a
    feature, in file order.

    Raises
    ------
    ConfigError
        If ``target_column`` is not in the header.
    ParseError
        On a missing, blank or non-numeric cell, or a row of the wrong
        length. Rows are counted from 1 with the header as row 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("file is empty, expected a header row", 1) from None
        if target_column not in header:
            raise ConfigError(f"target column {target_column!r} not found in header {header}")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ParseError(f"expected {len(header)} cells, found {len(record)}", lineno)
            values = []
            for name, cell in zip(header, record):
                text = cell.strip()
                if not text:
                    raise ParseError("missing value", lineno, name)
                try:
                    value = float(text)
                except ValueError:
                    raise ParseError(f"non-numeric value {text!r}", lineno, name) from None
                if not math.isfinite(value):
                    raise ParseError(f"non-finite value {text!r}", lineno, name)
                values.append(value)
            rows.append(values)
    if not rows:
        raise ParseError("no data rows", 2)
    data = np.array(rows)
    t = header.index(target_column)
    names = [h for i, h in enumerate(header) if i != t]
    return Dataset(np.delete(data, t, axis=1), data[:, t], Task(task), names)


def write_csv(path: str | Path, columns: Sequence[str], data: np.ndarray) -> None:
    """Write a numeric matrix with a header; floats use round-trip repr."""
    data = np.asarray(data, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows([[repr(float(v)) for v in row] for row in data])


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _check_keys(obj: Mapping, allowed: Sequence[str], where: str) -> None:
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {unknown}")


@dataclass(frozen=True)
class CsvSource:
    path: str
    target: str

    @classmethod
    def from_dict(cls, obj: Mapping) -> "CsvSource":
        _check_keys(obj, ("path", "target"), "data.csv")
        try:
            return cls(str(obj["path"]), str(obj["target"]))
        except KeyError as exc:
            raise ConfigError(f"data.csv is missing {exc.args[0]!r}") from None


@dataclass(frozen=True)
class SyntheticSource:
    form: str = "linear"
    dims: int = 100
    sigma: float = 10.0
    n: int = 3000
    standardize_signal: bool = True

    def __post_init__(self) -> None:
        try:
            Form(self.form)
        except ValueError:
            raise ConfigError(f"unknown form {self.form!r}") from None
        if self.dims < 1 or self.n < 3 or not self.sigma >= 0:
            raise ConfigError("synthetic data needs dims >= 1, n >= 3 and sigma >= 0")

    @classmethod
    def from_dict(cls, obj: Mapping) -> "SyntheticSource":
        _check_keys(obj, [f for f in cls.__dataclass_fields__], "data.synthetic")
        return cls(**obj)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on; serialized into every report.

    ``epsilon_grid`` is required by the two epsilon-driven reductions and
    ignored by the others. ``k_max`` bounds forward selection. With
    ``standardize`` the features are scaled to unit training variance before
    the transform, so all inputs share one scale.
    """

    algorithm: str
    data: CsvSource | SyntheticSource
    epsilon_grid: tuple[float, ...] = ()
    transform: str = "identity"
    aggregation: str = "mean"
    family: str | None = None
    task: str = "regression"
    seed: int = 0
    repetitions: int = 1
    train_fraction: float = 2.0 / 3.0
    k_max: int | None = None
    standardize: bool = True
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; known: {list(ALGORITHMS)}")
        object.__setattr__(self, "epsilon_grid", tuple(float(e) for e in self.epsilon_grid))
        if self.algorithm in _EPSILON_ALGORITHMS and not self.epsilon_grid:
            raise ConfigError(f"{self.algorithm} needs a non-empty epsilon_grid")
        if not all(math.isfinite(e) for e in self.epsilon_grid):
            raise ConfigError("epsilon values must be finite")
        try:
            Task(self.task)
        except ValueError:
            raise ConfigError(f"unknown task {self.task!r}") from None
        get_transform(self.transform)
        get_aggregation(self.aggregation)
        if self.family is not None:
            get_family(self.family)
        if self.algorithm == "lincfa" and (self.task != "regression" or self.aggregation != "mean"):
            raise ConfigError("lincfa supports regression with mean aggregation only")
        if self.algorithm == "nonlincfa" and self.task != "regression":
            raise ConfigError("nonlincfa supports regression only")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ConfigError("repetitions must be an integer >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie in (0, 1)")
        if self.algorithm == "forward_selection" and (self.k_max is None or self.k_max < 1):
            raise ConfigError("forward_selection needs k_max >= 1")
        if self.n_jobs < 1:
            raise ConfigError("n_jobs must be >= 1")

    @property
    def task_kind(self) -> Task:
        return Task(self.task)

    @property
    def family_name(self) -> str:
        if self.family is not None:
            return self.family
        return "bernoulli" if self.task_kind is Task.CLASSIFICATION else "gaussian"

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "ExperimentConfig":
        fields = [f for f in cls.__dataclass_fields__]
        _check_keys(obj, fields, "config")
        obj = dict(obj)
        if "algorithm" not in obj or "data" not in obj:
            raise ConfigError("config needs 'algorithm' and 'data'")
        data = obj["data"]
        _check_keys(data, ("csv", "synthetic"), "data")
        if len(data) != 1:
            raise ConfigError("data must have exactly one of 'csv' or 'synthetic'")
        ((kind, spec),) = data.items()
        obj["data"] = CsvSource.from_dict(spec) if kind == "csv" else SyntheticSource.from_dict(spec)
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        out = asdict(self)
        kind = "csv" if isinstance(self.data, CsvSource) else "synthetic"
        out["data"] = {kind: asdict(self.data)}
        out["epsilon_grid"] = list(self.epsilon_grid)
        return out

    def digest(self) -> str:
        """SHA-256 of the canonical JSON serialization."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


def _half_width(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(1.96 * values.std(ddof=1) / math.sqrt(values.size))


@dataclass
class ExperimentReport:
    """Per-repetition rows plus per-setting means and 95% half-widths.

    A *setting* is one epsilon for the epsilon-driven reductions, one
    subset size ``k`` for forward selection, and the single parameter-free
    run for LinCFA.
    """

    config: ExperimentConfig
    rows: list[dict] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def metric(self) -> str:
        return "accuracy" if self.config.task_kind is Task.CLASSIFICATION else "r2"

    def summary(self) -> list[dict]:
        settings: dict[tuple, list[dict]] = {}
        for row in self.rows:
            settings.setdefault((row["epsilon"], row["k"]), []).append(row)
        out = []
        for (eps, k), rows in settings.items():
            d = np.array([r["d"] for r in rows], dtype=float)
            s = np.array([r["score"] for r in rows], dtype=float)
            out.append(
                {
                    "epsilon": eps,
                    "k": k,
                    "repetitions": len(rows),
                    "single_run": len(rows) == 1,
                    "d_mean": float(d.mean()),
                    "d_half_width": _half_width(d),
                    "score_mean": float(s.mean()),
                    "score_half_width": _half_width(s),
                }
            )
        return out

    def setting(self, epsilon: float | None = None, k: int | None = None) -> dict:
        """Summary entry of one setting."""
        for entry in self.summary():
            if entry["epsilon"] == epsilon and entry["k"] == k:
                return entry
        raise KeyError((epsilon, k))

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "config_hash": self.config.digest(),
            "seed": self.config.seed,
            "metric": self.metric,
            "rows": self.rows,
            "summary": self.summary(),
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self, path: str | Path) -> None:
        """Flat per-setting table for plotting."""
        cols = ["epsilon", "k", "repetitions", "d_mean", "d_half_width", "score_mean", "score_half_width"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(cols)
            for entry in self.summary():
                writer.writerow(["" if entry[c] is None else entry[c] for c in cols])


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prepared:
    """Model inputs of one train/test split, preprocessed with training statistics only."""

    train_inputs: np.ndarray
    test_inputs: np.ndarray
    train_target: np.ndarray
    test_target: np.ndarray
    column_names: tuple[str, ...]


def prepare_split(
    train: Dataset, test: Dataset, transform: str = "identity", standardize: bool = True
) -> Prepared:
    """Center (and optionally scale) features, transform, then re-center.

    All statistics come from ``train``; ``test`` only has them applied.
    """
    tf = get_transform(transform)
    mean = train.features.mean(axis=0)
    scale = train.features.std(axis=0, ddof=1) if standardize else np.ones(train.D)
    if np.any(scale <= 0):
        raise InvalidData("a feature is constant on the training rows")
    tr = tf.apply((train.features - mean) / scale)
    te = tf.apply((test.features - mean) / scale)
    offset = tr.mean(axis=0)
    return Prepared(tr - offset, te - offset, train.target, test.target, train.column_names)


def reduce_inputs(
    algorithm: str,
    inputs: np.ndarray,
    y: np.ndarray,
    *,
    epsilon: float | None = None,
    transform: str = "identity",
    aggregation: str = "mean",
    family: str = "gaussian",
    column_names: Sequence[str] = (),
) -> Partition:
    """Run one of the partitioning reductions on prepared training inputs."""
    if algorithm == "nonlincfa":
        cfg = ReductionConfig(epsilon, get_transform(transform), get_aggregation(aggregation))
        return nonlin_partition(inputs, y, cfg, column_names=column_names)
    if algorithm == "genlincfa":
        cfg = ReductionConfig(epsilon, get_transform(transform), get_aggregation(aggregation), get_family(family))
        return genlin_partition(inputs, y, cfg, column_names=column_names)
    if algorithm == "lincfa":
        return lincfa_partition(inputs, y, column_names=column_names)
    raise ConfigError(f"{algorithm!r} does not produce a partition")


def _score(task: Task, Z_train, y_train, Z_test, y_test) -> float:
    if task is Task.CLASSIFICATION:
        fit = logistic_fit(Z_train, y_train)
        return accuracy(y_test, fit.predict_class(Z_test))
    offset = y_train.mean()
    fit = ols_fit(Z_train, y_train - offset)
    return r2_score(y_test, fit.predict(Z_test) + offset)


def _split(config: ExperimentConfig, repetition: int, csv_data: Dataset | None) -> tuple[Dataset, Dataset]:
    sub_seed = config.seed + repetition
    if csv_data is None:
        src = config.data
        spec = make_spec(src.dims, src.sigma, src.form, sub_seed, standardize_signal=src.standardize_signal)
        ds = generate(spec, src.n)
        if config.task_kind is Task.CLASSIFICATION:
            ds = to_classification(ds)
    else:
        ds = csv_data
    n_train = int(round(config.train_fraction * ds.n))
    if not 3 <= n_train <= ds.n - 1:
        raise ConfigError(f"train_fraction leaves {n_train} of {ds.n} rows for training")
    order = np.random.Generator(np.random.Philox(sub_seed)).permutation(ds.n)
    return ds.subset(order[:n_train]), ds.subset(order[n_train:])


def _run_repetition(config: ExperimentConfig, repetition: int, csv_data: Dataset | None) -> list[dict]:
    train, test = _split(config, repetition, csv_data)
    prep = prepare_split(train, test, config.transform, config.standardize)
    task = config.task_kind
    base = {"repetition": repetition, "seed": config.seed + repetition}
    rows = []
    if config.algorithm == "forward_selection":
        k_max = min(config.k_max, train.D)
        path = forward_selection(prep.train_inputs, prep.train_target, k_max, task)
        chosen = [j for j, _ in path]
        for k in range(1, len(chosen) + 1):
            cols = chosen[:k]
            score = _score(task, prep.train_inputs[:, cols], prep.train_target, prep.test_inputs[:, cols], prep.test_target)
            rows.append({**base, "epsilon": None, "k": k, "d": k, "score": score})
        return rows
    grid = config.epsilon_grid if config.algorithm in _EPSILON_ALGORITHMS else (None,)
    for eps in grid:
        part = reduce_inputs(
            config.algorithm,
            prep.train_inputs,
            prep.train_target,
            epsilon=eps,
            transform=config.transform,
            aggregation=config.aggregation,
            family=config.family_name,
            column_names=prep.column_names,
        )
        score = _score(task, part.representatives, prep.train_target, part.reduce(prep.test_inputs), prep.test_target)
        rows.append({**base, "epsilon": eps, "k": None, "d": part.d, "score": score})
    return rows


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Repeat split, reduce, fit and score; collect rows ordered by (setting, repetition).

    Repetition ``r`` uses sub-seed ``seed + r`` both to generate synthetic
    data and to shuffle the train/test split, so results do not depend on
    ``n_jobs``.
    """
    start = time.perf_counter()
    csv_data = None
    if isinstance(config.data, CsvSource):
        csv_data = load_csv(config.data.path, config.data.target, config.task_kind)

    def job(r: int) -> list[dict]:
        try:
            return _run_repetition(config, r, csv_data)
        except FeatAggError as exc:
            exc.args = (f"repetition {r} (seed {config.seed + r}): {exc}",)
            raise

    reps = range(config.repetitions)
    if config.n_jobs > 1:
        with ThreadPoolExecutor(config.n_jobs) as pool:
            per_rep = list(pool.map(job, reps))
    else:
        per_rep = [job(r) for r in reps]
    n_settings = max(len(rows) for rows in per_rep)
    rows = [per_rep[r][s] for s in range(n_settings) for r in reps if s < len(per_rep[r])]
    report = ExperimentReport(config, rows)
    report.wall_time_s = time.perf_counter() - start
    return report
