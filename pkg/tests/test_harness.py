import json

import numpy as np
import pytest

from featagg.core import Dataset, Task
from featagg.errors import ConfigError, InvalidData, ParseError
from featagg.harness import (
    ExperimentConfig,
    SyntheticSource,
    load_csv,
    prepare_split,
    reduce_inputs,
    run_experiment,
    write_csv,
)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_csv_round_trip(tmp_path):
    data = np.random.default_rng(0).normal(size=(6, 3))
    write_csv(tmp_path / "d.csv", ["a", "y", "b"], data)
    ds = load_csv(tmp_path / "d.csv", "y")
    assert ds.column_names == ("a", "b")
    np.testing.assert_array_equal(ds.features, data[:, [0, 2]])
    np.testing.assert_array_equal(ds.target, data[:, 1])


@pytest.mark.parametrize(
    "body, row, column",
    [
        ("a,y\n1,2\n3,x\n4,5\n", 3, "y"),
        ("a,y\n1,2\n,1\n4,5\n", 3, "a"),
        ("a,y\n1,2\n3,4\n4,nan\n", 4, "y"),
        ("a,y\n1,2\n3\n4,5\n", 3, ""),
    ],
)
def test_parse_errors_name_row_and_column(tmp_path, body, row, column):
    path = _write(tmp_path / "bad.csv", body)
    with pytest.raises(ParseError) as info:
        load_csv(path, "y")
    assert info.value.row == row and info.value.column == column
    assert f"line {row}" in str(info.value)


def test_missing_target_column(tmp_path):
    path = _write(tmp_path / "d.csv", "a,b\n1,2\n3,4\n5,6\n")
    with pytest.raises(ConfigError):
        load_csv(path, "y")


def test_classification_csv_requires_labels(tmp_path):
    path = _write(tmp_path / "d.csv", "a,y\n1,0\n2,1\n3,1\n")
    assert load_csv(path, "y", "classification").task is Task.CLASSIFICATION


def _cfg(**kw):
    base = {
        "algorithm": "nonlincfa",
        "data": {"synthetic": {"dims": 10, "sigma": 1.0, "n": 150}},
        "epsilon_grid": [0.0, 0.01],
        "repetitions": 3,
        "seed": 4,
    }
    return ExperimentConfig.from_dict(base | kw)


def test_unknown_config_keys_are_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        _cfg(learning_rate=0.1)
    with pytest.raises(ConfigError, match="unknown key"):
        _cfg(data={"synthetic": {"dims": 5, "noise": 1}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("{not json")


@pytest.mark.parametrize(
    "bad",
    [
        {"algorithm": "pca"},
        {"epsilon_grid": []},
        {"algorithm": "lincfa", "aggregation": "sum_of_squares"},
        {"algorithm": "nonlincfa", "task": "classification"},
        {"algorithm": "forward_selection"},
        {"train_fraction": 1.0},
        {"seed": -1},
        {"repetitions": 0},
        {"transform": "cube"},
    ],
)
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        _cfg(**bad)


def test_config_round_trip_and_digest():
    cfg = _cfg()
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg and again.digest() == cfg.digest()
    assert _cfg(seed=5).digest() != cfg.digest()


def _without_time(report):
    obj = report.to_dict()
    obj.pop("wall_time_s")
    return json.dumps(obj, sort_keys=True)


def test_report_is_deterministic_and_independent_of_threads():
    a = run_experiment(_cfg())
    b = run_experiment(_cfg())
    c = run_experiment(_cfg(n_jobs=3))
    assert _without_time(a) == _without_time(b)
    assert c.rows == a.rows and c.summary() == a.summary()


def test_report_rows_and_summary():
    report = run_experiment(_cfg())
    assert [(r["epsilon"], r["repetition"]) for r in report.rows] == [
        (e, r) for e in (0.0, 0.01) for r in range(3)
    ]
    entry = report.setting(0.01)
    ds = [r["d"] for r in report.rows if r["epsilon"] == 0.01]
    assert entry["d_mean"] == pytest.approx(np.mean(ds))
    assert entry["d_half_width"] == pytest.approx(1.96 * np.std(ds, ddof=1) / np.sqrt(3))
    obj = json.loads(report.to_json())
    assert set(obj) == {"config", "config_hash", "seed", "metric", "rows", "summary", "wall_time_s"}


def test_single_run_is_flagged():
    entry = run_experiment(_cfg(repetitions=1)).summary()[0]
    assert entry["single_run"] and entry["d_half_width"] == 0.0


def test_forward_selection_and_lincfa_runs():
    fs = run_experiment(_cfg(algorithm="forward_selection", k_max=3, epsilon_grid=[]))
    assert [e["k"] for e in fs.summary()] == [1, 2, 3]
    lin = run_experiment(_cfg(algorithm="lincfa", epsilon_grid=[]))
    assert [e["epsilon"] for e in lin.summary()] == [None]


def test_classification_run_reports_accuracy():
    report = run_experiment(
        _cfg(algorithm="genlincfa", task="classification", epsilon_grid=[0.7], repetitions=2)
    )
    assert report.metric == "accuracy"
    assert all(0.0 <= r["score"] <= 1.0 for r in report.rows)


def test_csv_experiment(tmp_path):
    rng = np.random.default_rng(2)
    X = rng.normal(size=(90, 4))
    write_csv(tmp_path / "d.csv", ["a", "b", "c", "d", "t"], np.column_stack([X, X.sum(axis=1) + rng.normal(size=90)]))
    cfg = _cfg(data={"csv": {"path": str(tmp_path / "d.csv"), "target": "t"}}, epsilon_grid=[0.01])
    report = run_experiment(cfg)
    assert len(report.rows) == 3 and all(r["score"] > 0.5 for r in report.rows)


def test_errors_carry_the_repetition(tmp_path):
    X = np.ones((30, 2))
    X[:, 1] = np.arange(30)
    write_csv(tmp_path / "d.csv", ["a", "b", "t"], np.column_stack([X, np.arange(30.0)]))
    cfg = _cfg(data={"csv": {"path": str(tmp_path / "d.csv"), "target": "t"}})
    with pytest.raises(InvalidData, match="repetition 0 .*constant"):
        run_experiment(cfg)


def test_preprocessing_uses_training_statistics_only():
    rng = np.random.default_rng(1)
    train = Dataset(rng.normal(size=(50, 3)), rng.normal(size=50))
    test = Dataset(rng.normal(size=(20, 3)) + 100.0, rng.normal(size=20))
    a = prepare_split(train, test)
    shifted = Dataset(test.features + 50.0, test.target)
    b = prepare_split(train, shifted)
    np.testing.assert_array_equal(a.train_inputs, b.train_inputs)
    scale = train.features.std(axis=0, ddof=1)
    np.testing.assert_allclose(b.test_inputs - a.test_inputs, np.broadcast_to(50.0 / scale, (20, 3)))
    np.testing.assert_allclose(a.train_inputs.mean(axis=0), 0.0, atol=1e-12)


def test_test_rows_do_not_influence_the_partition():
    rng = np.random.default_rng(7)
    train = Dataset(rng.normal(size=(60, 6)), rng.normal(size=60))
    parts = []
    for shift in (0.0, 1e3):
        test = Dataset(rng.normal(size=(20, 6)) + shift, rng.normal(size=20))
        prep = prepare_split(train, test, "square")
        parts.append(reduce_inputs("nonlincfa", prep.train_inputs, prep.train_target, epsilon=0.02).clusters)
    assert parts[0] == parts[1]


def test_synthetic_source_validation():
    with pytest.raises(ConfigError):
        SyntheticSource(form="cubic")
    with pytest.raises(ConfigError):
        SyntheticSource(n=2)
