"""Command-line interface: ``featagg {reduce,evaluate,synth,verify-theory}``.

Exit status is 0 on success, 1 when data or configuration fail validation
(or a theory check misses its tolerance), and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Task
from .errors import FeatAggError
from .harness import (
    ExperimentConfig,
    load_csv,
    prepare_split,
    reduce_inputs,
    run_experiment,
    write_csv,
)
from .synthgen import generate, make_spec, to_classification
from .theory import SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


def _existing(flag: str):
    def check(value: str) -> str:
        if not Path(value).is_file():
            raise argparse.ArgumentTypeError(f"{flag}: no such file {value!r}")
        return value

    return check


def _non_negative_int(value: str) -> int:
    try:
        out = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if out < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {out}")
    return out


def _positive_int(value: str) -> int:
    out = _non_negative_int(value)
    if out < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {out}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featagg",
        description="Supervised feature aggregation: reduce, benchmark and verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="fit a partition on a CSV and write the reduced data")
    p.add_argument("--algo", required=True, choices=["nonlincfa", "genlincfa", "lincfa"])
    p.add_argument("--epsilon", type=float, help="aggregation threshold (nonlincfa, genlincfa)")
    p.add_argument("--agg", default="mean", help="aggregation: mean, sum_of_squares")
    p.add_argument("--transform", default="identity", help="input transform: identity, square")
    p.add_argument("--family", choices=["gaussian", "bernoulli"], help="genlincfa family")
    p.add_argument("--task", default="regression", choices=[t.value for t in Task])
    p.add_argument("--in", dest="input", required=True, type=_existing("--in"))
    p.add_argument("--target", required=True)
    p.add_argument("--out-partition", required=True)
    p.add_argument("--out-reduced", required=True)
    p.add_argument("--no-standardize", action="store_true", help="center only, do not scale features")

    p = sub.add_parser("evaluate", help="run a repeated experiment from a JSON config")
    p.add_argument("--config", required=True, type=_existing("--config"))
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--out-csv", help="flat per-setting CSV path")

    p = sub.add_parser("synth", help="write a synthetic dataset as CSV")
    p.add_argument("--form", default="linear", choices=["linear", "quadratic"])
    p.add_argument("--dims", type=_positive_int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--classification", action="store_true", help="threshold the target at 0")
    p.add_argument("--raw-signal", action="store_true", help="build the target from unscaled features")
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify-theory", help="Monte Carlo checks of the bias/variance results")
    p.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    p.add_argument("--reps", type=_positive_int, default=2000)
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--out", help="verification JSON path (printed when omitted)")
    return parser


def _cmd_reduce(args, parser) -> int:
    if args.algo != "lincfa" and args.epsilon is None:
        parser.error(f"--epsilon is required for --algo {args.algo}")
    ds = load_csv(args.input, args.target, args.task)
    prep = prepare_split(ds, ds, args.transform, standardize=not args.no_standardize)
    family = args.family or ("bernoulli" if args.task == "classification" else "gaussian")
    part = reduce_inputs(
        args.algo,
        prep.train_inputs,
        prep.train_target,
        epsilon=args.epsilon,
        transform=args.transform,
        aggregation=args.agg,
        family=family,
        column_names=ds.column_names,
    )
    Path(args.out_partition).write_text(part.to_json() + "\n", encoding="utf-8")
    cols = [f"cluster{k + 1}" for k in range(part.d)] + [args.target]
    write_csv(args.out_reduced, cols, np.column_stack([part.representatives, ds.target]))
    print(f"{ds.D} inputs -> {part.d} clusters")
    return EXIT_OK


def _cmd_evaluate(args, parser) -> int:
    config = ExperimentConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    report = run_experiment(config)
    Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    if args.out_csv:
        report.to_csv(args.out_csv)
    for entry in report.summary():
        setting = entry["epsilon"] if entry["k"] is None else f"k={entry['k']}"
        print(
            f"{setting}: d = {entry['d_mean']:.2f} +/- {entry['d_half_width']:.2f}, "
            f"{report.metric} = {entry['score_mean']:.4f} +/- {entry['score_half_width']:.4f}"
        )
    return EXIT_OK


def _cmd_synth(args, parser) -> int:
    if args.sigma < 0:
        parser.error("--sigma must be non-negative")
    if args.n < 3:
        parser.error("--n must be at least 3")
    spec = make_spec(args.dims, args.sigma, args.form, args.seed, standardize_signal=not args.raw_signal)
    ds = generate(spec, args.n)
    if args.classification:
        ds = to_classification(ds)
    write_csv(args.out, list(ds.column_names) + ["y"], np.column_stack([ds.features, ds.target]))
    return EXIT_OK


def _cmd_verify(args, parser) -> int:
    result = run_suite(args.suite, args.reps, args.seed)
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    for c in result["checks"]:
        status = "ok  " if c["passed"] else "FAIL"
        print(f"{status} {c['name']}: {c['value']:.6g} vs {c['expected']:.6g} (tol {c['tolerance']:.3g})")
    if not args.out:
        print(text)
    return EXIT_OK if result["passed"] else EXIT_INVALID


_COMMANDS = {
    "reduce": _cmd_reduce,
    "evaluate": _cmd_evaluate,
    "synth": _cmd_synth,
    "verify-theory": _cmd_verify,
}


def cli_main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return the exit status instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, parser)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except FeatAggError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
