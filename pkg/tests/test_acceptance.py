"""Benchmark reproduction and theory checks, one test per acceptance criterion.

Means must land within max(3 x reported half-width, 0.02) of the reference
value; reduced dimensions within max(3 x half-width, 1). "d = 1 exactly"
means every repetition produced a single cluster.
"""

import os

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from featagg.baselines import lincfa_partition
from featagg.core import MEAN, SUM_OF_SQUARES, ReductionConfig
from featagg.genlincfa import genlin_partition, make_bernoulli_family, make_gaussian_family
from featagg.harness import ExperimentConfig, run_experiment
from featagg.nonlincfa import nonlin_partition
from featagg.theory import run_suite

JOBS = min(4, os.cpu_count() or 1)


def _run(**kw):
    base = {"seed": 0, "repetitions": 10, "n_jobs": JOBS}
    return run_experiment(ExperimentConfig.from_dict(base | kw))


def _synthetic(dims, sigma, form="linear"):
    return {"synthetic": {"form": form, "dims": dims, "sigma": sigma, "n": 3000}}


def _score(entry, mean, hw, label):
    tol = max(3 * hw, 0.02)
    got = entry["score_mean"]
    return abs(got - mean) <= tol, f"{label} {got:.4f} vs {mean}+/-{tol:.4f}"


def _d_near(entry, mean, hw, label):
    tol = max(3 * hw, 1.0)
    got = entry["d_mean"]
    return abs(got - mean) <= tol, f"{label} d {got:.1f} vs {mean}+/-{tol:.2f}"


def _d_one(entry, label):
    ok = entry["d_mean"] == 1.0 and entry["d_half_width"] == 0.0
    return ok, f"{label} d {entry['d_mean']:.1f}+/-{entry['d_half_width']:.2f} (want 1 exactly)"


def _combine(parts):
    return all(ok for ok, _ in parts), "; ".join(text for _, text in parts)


def test_criterion_1_nonlincfa_linear_d100(verdict):
    rep = _run(algorithm="nonlincfa", data=_synthetic(100, 10.0), epsilon_grid=[0.01, 0.001])
    a, b = rep.setting(0.01), rep.setting(0.001)
    parts = [
        _d_one(a, "eps=0.01"),
        _score(a, 0.8655, 0.0051, "eps=0.01 R2"),
        _d_near(b, 8.0, 0.88, "eps=0.001"),
        _score(b, 0.8664, 0.0048, "eps=0.001 R2"),
        (rep.wall_time_s < 120, f"{rep.wall_time_s:.0f}s"),
    ]
    verdict(1, *_combine(parts))


def test_criterion_2_genlincfa_linear_d1000(verdict):
    rep = _run(algorithm="genlincfa", data=_synthetic(1000, 100.0), epsilon_grid=[0.78, 0.79, 0.80])
    parts = []
    for eps in (0.78, 0.79, 0.80):
        entry = rep.setting(eps)
        parts += [_d_one(entry, f"eps={eps}"), _score(entry, 0.7332, 0.0069, f"eps={eps} R2")]
    parts.append((rep.wall_time_s < 600, f"{rep.wall_time_s:.0f}s"))
    verdict(2, *_combine(parts))


def test_criterion_3_genlincfa_classification(verdict):
    rep = _run(
        algorithm="genlincfa",
        task="classification",
        data=_synthetic(100, 10.0),
        epsilon_grid=[0.77, 0.71],
    )
    a, b = rep.setting(0.77), rep.setting(0.71)
    parts = [
        _d_one(a, "eps=0.77"),
        _score(a, 0.8975, 0.0054, "eps=0.77 accuracy"),
        _d_near(b, 25.2, 1.59, "eps=0.71"),
        _score(b, 0.8928, 0.0064, "eps=0.71 accuracy"),
    ]
    verdict(3, *_combine(parts))


def test_criterion_4_nonlincfa_quadratic(verdict):
    rep = _run(
        algorithm="nonlincfa",
        data=_synthetic(100, 10.0, "quadratic"),
        transform="square",
        aggregation="mean",
        epsilon_grid=[0.01],
    )
    entry = rep.setting(0.01)
    verdict(4, *_combine([_d_one(entry, "eps=0.01"), _score(entry, 0.7436, 0.0096, "R2")]))


def test_criterion_5_lincfa_baseline(verdict):
    entry = _run(algorithm="lincfa", data=_synthetic(100, 10.0)).setting(None)
    verdict(5, *_combine([_d_near(entry, 39.0, 1.52, "LinCFA"), _score(entry, 0.8659, 0.0049, "R2")]))


def _suite_verdict(name, reps):
    result = run_suite(name, reps, seed=0)
    detail = "; ".join(
        f"{c['name']} {c['value']:.6g} vs {c['expected']:.6g} (tol {c['tolerance']:.3g})" for c in result["checks"]
    )
    return result["passed"], detail


def test_criterion_6_variance_gap(verdict):
    verdict(6, *_suite_verdict("variance", 5000))


def test_criterion_7_bias_gap(verdict):
    verdict(7, *_suite_verdict("bias", 2000))


def test_criterion_8_gaussian_deviance_equivalence(verdict):
    verdict(8, *_suite_verdict("gaussian-equivalence", 2000))


# -- criterion 9: properties ------------------------------------------------


def _props(examples):
    return settings(
        max_examples=examples, deadline=None, derandomize=True, suppress_health_check=list(HealthCheck)
    )


def _random_instance(data):
    n = data.draw(st.integers(8, 60))
    D = data.draw(st.integers(1, 12))
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    groups = rng.integers(0, max(1, D // 3), D)
    X = rng.normal(size=(n, max(1, D // 3)))[:, groups] + rng.uniform(0.05, 1.5) * rng.normal(size=(n, D))
    X = X - X.mean(axis=0)
    y = X @ rng.normal(size=D) + rng.normal(size=n)
    return X, y


@_props(1000)
@given(st.data())
def _partition_is_disjoint_cover(data):
    X, y = _random_instance(data)
    algo = data.draw(st.sampled_from(["nonlin", "nonlin_sos", "gauss", "bern", "lincfa"]))
    eps = data.draw(st.floats(-0.5, 2.0))
    if algo == "nonlin":
        part = nonlin_partition(X, y, eps)
    elif algo == "nonlin_sos":
        part = nonlin_partition(X, y, ReductionConfig(eps, aggregation=SUM_OF_SQUARES))
    elif algo == "gauss":
        part = genlin_partition(X, y, ReductionConfig(eps, family=make_gaussian_family()))
    elif algo == "bern":
        part = genlin_partition(X, (y > 0).astype(float), ReductionConfig(eps, family=make_bernoulli_family()))
    else:
        part = lincfa_partition(X, y)
    flat = sorted(i for c in part.clusters for i in c)
    assert flat == list(range(X.shape[1]))
    assert part.representatives.shape == (X.shape[0], len(part.clusters))


@_props(300)
@given(st.data())
def _aggregated_r2_never_exceeds_bivariate(data):
    X, y = _random_instance(data)
    trace = []
    nonlin_partition(X, y, ReductionConfig(data.draw(st.floats(-0.05, 0.2)), aggregation=MEAN), trace=trace)
    for ev in trace:
        if np.isfinite(ev.details["r2_bivariate"]):
            assert ev.details["r2_aggregated"] <= ev.details["r2_bivariate"] + 1e-9


def _generic(seed, n=80, D=10):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, D))
    X = X - X.mean(axis=0)
    return X, X @ rng.normal(size=D) + rng.normal(size=n)


def _epsilon_boundaries():
    for seed in range(20):
        X, y = _generic(seed)
        D = X.shape[1]
        gauss = make_gaussian_family()
        assert nonlin_partition(X, y, -2.0).d == D
        assert nonlin_partition(X, y, 1.0).d == 1
        assert genlin_partition(X, y, ReductionConfig(0.0, family=gauss)).d == D
        assert genlin_partition(X, y, ReductionConfig(1e6, family=gauss)).d == 1


def _second_derivatives():
    assert make_gaussian_family().b_second_at_zero == 1.0
    assert make_bernoulli_family().b_second_at_zero == 0.25


def _reports_are_reproducible():
    cfg = {
        "algorithm": "genlincfa",
        "data": {"synthetic": {"dims": 20, "sigma": 2.0, "n": 300}},
        "epsilon_grid": [0.7, 0.8],
        "repetitions": 3,
        "seed": 11,
    }
    texts = []
    for jobs in (1, 1, 3):
        rep = run_experiment(ExperimentConfig.from_dict(cfg | {"n_jobs": jobs}))
        rep.wall_time_s = 0.0
        obj = rep.to_dict()
        obj["config"].pop("n_jobs")
        obj.pop("config_hash")
        texts.append((rep.to_json().encode(), obj))
    assert texts[0][0] == texts[1][0]
    assert texts[0][1] == texts[2][1]


def test_criterion_9_property_suite(verdict):
    checks = {
        "disjoint cover on 1000 instances": _partition_is_disjoint_cover,
        "R2 nestedness at every evaluation": _aggregated_r2_never_exceeds_bivariate,
        "epsilon boundaries": _epsilon_boundaries,
        "b''(0) values": _second_derivatives,
        "byte-identical reports": _reports_are_reproducible,
    }
    failed = []
    for name, check in checks.items():
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - every failure is reported by name
            failed.append(f"{name}: {type(exc).__name__}: {exc}")
    verdict(9, not failed, "; ".join(failed) or ", ".join(checks))
