import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from featagg.core import (
    MEAN,
    SQUARE,
    SUM_OF_SQUARES,
    Dataset,
    GenerativeSpec,
    Partition,
    ReductionConfig,
    Task,
    get_aggregation,
    get_transform,
    register_aggregation,
)
from featagg.errors import ConfigError, InvalidData


def test_dataset_defaults_and_immutability():
    ds = Dataset(np.arange(12.0).reshape(4, 3), [1, 2, 3, 4])
    assert ds.column_names == ("x1", "x2", "x3")
    assert (ds.n, ds.D) == (4, 3)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 99.0


def test_dataset_copies_input():
    X = np.ones((3, 2))
    ds = Dataset(X, [0.0, 1.0, 2.0])
    X[0, 0] = 5.0
    assert ds.features[0, 0] == 1.0


@pytest.mark.parametrize(
    "features, target, task",
    [
        (np.ones((2, 2)), [1, 2], Task.REGRESSION),
        (np.ones((3, 2)), [1, 2], Task.REGRESSION),
        (np.array([[1.0], [np.nan], [2.0]]), [1, 2, 3], Task.REGRESSION),
        (np.ones((3, 1)), [0, 1, 2], Task.CLASSIFICATION),
    ],
)
def test_dataset_validation(features, target, task):
    with pytest.raises(InvalidData):
        Dataset(features, target, task)


def test_subset_keeps_names_and_task():
    ds = Dataset(np.arange(8.0).reshape(4, 2), [0, 1, 1, 0], Task.CLASSIFICATION, ["a", "b"])
    sub = ds.subset(np.array([3, 0, 1]))
    assert sub.column_names == ("a", "b") and sub.task is Task.CLASSIFICATION
    np.testing.assert_array_equal(sub.target, [0, 0, 1])


def test_aggregations():
    members = np.array([[1.0, 3.0], [2.0, -2.0]])
    np.testing.assert_allclose(MEAN.aggregate(members), [2.0, 0.0])
    np.testing.assert_allclose(SUM_OF_SQUARES.aggregate(members), [10.0, 8.0])
    np.testing.assert_allclose(SQUARE.apply(members), members**2)
    assert MEAN.decomposable and SUM_OF_SQUARES.decomposable


def test_registry_lookup_and_custom_aggregation():
    assert get_transform("square") is SQUARE
    assert get_aggregation("mean") is MEAN
    with pytest.raises(ConfigError):
        get_aggregation("median-ish")
    spec = register_aggregation("max_abs_test", lambda m: np.abs(m).max(axis=1))
    assert not spec.decomposable
    np.testing.assert_allclose(get_aggregation("max_abs_test").aggregate(np.array([[1.0, -4.0]])), [4.0])


def _inputs(n=20, D=5, seed=0):
    X = np.random.default_rng(seed).normal(size=(n, D))
    return X - X.mean(axis=0)


def test_partition_build_reduce_and_centering():
    X = _inputs()
    part = Partition.build([[0, 2], [1], [3, 4]], X)
    assert part.d == 3 and part.D == 5
    np.testing.assert_allclose(part.representatives.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(part.reduce(X), part.representatives, atol=1e-12)
    np.testing.assert_allclose(part.representatives[:, 0] + part.representative_means[0], X[:, [0, 2]].mean(axis=1))


@pytest.mark.parametrize("clusters", [[[0, 1], [1, 2, 3, 4]], [[0, 1], [3, 4]], [[0], [], [1, 2, 3, 4]]])
def test_partition_rejects_non_partitions(clusters):
    X = _inputs()
    with pytest.raises(InvalidData):
        Partition.build(clusters, X)


def test_partition_json_round_trip_by_name():
    X = _inputs()
    names = ["a", "b", "c", "d", "e"]
    part = Partition.build([[0, 3], [1, 2, 4]], X, SUM_OF_SQUARES, SQUARE, names)
    obj = json.loads(part.to_json())
    assert obj == {"clusters": [["a", "d"], ["b", "c", "e"]], "aggregation": "sum_of_squares", "transform": "square"}
    again = Partition.from_json(part.to_json(), X, names)
    assert again.clusters == part.clusters
    np.testing.assert_allclose(again.representatives, part.representatives)
    # a different column order still resolves by name
    order = [4, 3, 2, 1, 0]
    moved = Partition.from_json(part.to_json(), X[:, order], [names[i] for i in order])
    np.testing.assert_allclose(moved.representatives, part.representatives)


def test_partition_from_dict_rejects_unknown_keys_and_columns():
    X = _inputs()
    with pytest.raises(ConfigError):
        Partition.from_dict({"clusters": [["x1"]], "aggregation": "mean", "transform": "identity", "x": 1}, X, [])
    bad = {"clusters": [["x1", "zz"]], "aggregation": "mean", "transform": "identity"}
    with pytest.raises(InvalidData):
        Partition.from_dict(bad, X, ["x1", "x2", "x3", "x4", "x5"])


@settings(max_examples=100, deadline=None)
@given(st.permutations(list(range(7))), st.lists(st.integers(1, 7), min_size=1, max_size=7))
def test_any_split_of_a_permutation_is_a_valid_partition(perm, cuts):
    clusters, start = [], 0
    for c in cuts:
        if start >= 7:
            break
        clusters.append(perm[start : start + c])
        start += c
    if start < 7:
        clusters.append(perm[start:])
    part = Partition.build(clusters, _inputs(D=7))
    assert sorted(i for c in part.clusters for i in c) == list(range(7))


def test_reduction_config_validation():
    cfg = ReductionConfig(0.1, "square", "sum_of_squares")
    assert cfg.transform is SQUARE and cfg.aggregation is SUM_OF_SQUARES
    with pytest.raises(ConfigError):
        ReductionConfig(float("nan"))


def test_generative_spec_validation():
    with pytest.raises(ConfigError):
        GenerativeSpec(3, (1.0, 2.0), 1.0)
    with pytest.raises(ConfigError):
        GenerativeSpec(1, (1.0,), -1.0)
    spec = GenerativeSpec(2, [1, 2], 0.0, "quadratic")
    assert spec.true_weights == (1.0, 2.0) and spec.form.value == "quadratic"
