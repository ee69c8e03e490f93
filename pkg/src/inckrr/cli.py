"""Command-line entry point: ``inckrr {fit,stream,bench,check}``."""

from __future__ import annotations

import argparse
import json
import statistics
import sys

import numpy as np

from . import _accel, kbr, krr_empirical, krr_intrinsic, serialize
from .edits import sign_labels
from .errors import InckrrError
from .harness import data as hdata
from .harness.report import report, summary
from .harness.stream import SPACES, STRATEGIES, StreamPlan, run_stream
from .kernels import DEFAULT_RADIUS, KernelSpec

EXIT_OK, EXIT_ERROR, EXIT_CHECK_FAILED = 0, 1, 2
DEFAULT_TOL = 1e-8


def _add_data_args(p):
    p.add_argument("data", nargs="?", help="dataset file; omit to use --synthetic or --preset")
    p.add_argument("--input-format", choices=hdata.FORMATS, default="dense-csv")
    p.add_argument("--dim", type=int, help="force the feature dimension of sparse input")
    p.add_argument("--synthetic", nargs=2, type=int, metavar=("N", "M"), help="synthetic two-class data")
    p.add_argument("--preset", choices=sorted(hdata.PRESETS), help="synthetic shape preset")
    p.add_argument("--noise", type=float, default=1.0, help="noise sigma of synthetic data")
    p.add_argument("--data-seed", type=int, default=0)


def _add_model_args(p):
    p.add_argument("--kernel", default="poly2", help="poly2 | poly3 | rbf (any polyN accepted)")
    p.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    p.add_argument("--ridge", type=float, default=0.5)
    p.add_argument("--space", choices=SPACES, default="empirical")
    p.add_argument("--sigma-u2", type=float, default=kbr.DEFAULT_VARIANCE)
    p.add_argument("--sigma-b2", type=float, default=kbr.DEFAULT_VARIANCE)


def _add_stream_args(p, strategy=True):
    p.add_argument("--adds", type=int, default=4)
    p.add_argument("--removes", type=int, default=2)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-frac", type=float, default=0.8,
                   help="share of the non-test samples used for the initial fit")
    p.add_argument("--test-frac", type=float, default=0.2)
    p.add_argument("--n-initial", type=int, help="initial training size (overrides --train-frac)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="equivalence tolerance")
    if strategy:
        p.add_argument("--strategy", choices=STRATEGIES + ("all",), default="all")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inckrr", description="Incremental/decremental kernel ridge regression")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model and write it as JSON")
    _add_data_args(p)
    _add_model_args(p)
    p.add_argument("--out", help="model file to write")

    p = sub.add_parser("stream", help="replay an edit stream and print per-round reports")
    _add_data_args(p)
    _add_model_args(p)
    _add_stream_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--no-verify", action="store_true", help="skip the refit oracle when refit is not run")

    p = sub.add_parser("bench", help="time batch, single and refit strategies")
    _add_data_args(p)
    _add_model_args(p)
    _add_stream_args(p, strategy=False)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("check", help="verify every strategy against the refit oracle")
    _add_data_args(p)
    _add_model_args(p)
    _add_stream_args(p, strategy=False)
    return parser


def load_dataset(args) -> hdata.Dataset:
    if args.data:
        return hdata.ingest(args.data, args.input_format, args.dim)
    if args.synthetic:
        n, M = args.synthetic
    elif args.preset:
        n, M = hdata.PRESETS[args.preset]["n"], hdata.PRESETS[args.preset]["M"]
    else:
        raise ValueError("give a data file, --synthetic N M or --preset")
    return hdata.synthesize(n, M, args.noise, args.data_seed)


def _spec_prior(args):
    spec = KernelSpec.parse(args.kernel, args.radius)
    prior = kbr.BayesPrior(args.sigma_u2, args.sigma_b2)
    return spec, prior


def _plan(args, strategy: str, verify: bool = True) -> StreamPlan:
    return StreamPlan(
        rounds=args.rounds,
        adds_per_round=args.adds,
        removes_per_round=args.removes,
        seed=args.seed,
        strategy=strategy,
        space=args.space,
        initial_fraction=args.train_frac,
        test_fraction=args.test_frac,
        n_initial=args.n_initial,
        verify=verify,
    )


def _passed(result, tol: float) -> bool:
    summ = summary(result)
    dev = summ["max_deviation"]
    return summ["parity"] and (dev is None or dev <= tol)


def cmd_fit(args) -> int:
    ds = load_dataset(args)
    spec, prior = _spec_prior(args)
    if args.space == "intrinsic":
        model = krr_intrinsic.fit(ds.X, ds.y, spec, args.ridge, ids=ds.ids)
        scores = krr_intrinsic.predict(model, ds.X)
    elif args.space == "empirical":
        model = krr_empirical.fit(ds.X, ds.y, spec, args.ridge, ids=ds.ids)
        scores = krr_empirical.predict(model, ds.X)
    else:
        model = kbr.fit_posterior(ds.X, ds.y, prior, spec, ids=ds.ids)
        scores = kbr.predict(model, ds.X)
    if args.out:
        serialize.save(model, args.out)
    acc = float(np.mean(sign_labels(scores) == sign_labels(ds.y)))
    print(json.dumps({"space": args.space, "kernel": spec.label(), "n": ds.n, "M": ds.M,
                      "train_accuracy": acc, "model": args.out}))
    return EXIT_OK


def cmd_stream(args) -> int:
    ds = load_dataset(args)
    spec, prior = _spec_prior(args)
    result = run_stream(ds, _plan(args, args.strategy, not args.no_verify), spec, args.ridge, prior)
    print(report(result, args.format), end="" if args.format == "csv" else "\n")
    return EXIT_OK if _passed(result, args.tol) else EXIT_CHECK_FAILED


def cmd_bench(args) -> int:
    ds = load_dataset(args)
    spec, prior = _spec_prior(args)
    result = run_stream(ds, _plan(args, "all"), spec, args.ridge, prior)
    if args.format == "csv":
        print(report(result, "csv"), end="")
    else:
        summ = summary(result)
        summ["median_seconds"] = {s: statistics.median(r.seconds[s] for r in result) for s in result.strategies}
        summ["initial_fit_seconds"] = result.initial_fit_seconds
        summ["backend"] = _accel.BACKEND
        summ["space"], summ["kernel"], summ["n_initial"] = result.space, result.kernel, result.n_initial
        print(json.dumps(summ, indent=2))
    return EXIT_OK if _passed(result, args.tol) else EXIT_CHECK_FAILED


def cmd_check(args) -> int:
    ds = load_dataset(args)
    spec, prior = _spec_prior(args)
    result = run_stream(ds, _plan(args, "all"), spec, args.ridge, prior)
    ok = True
    for r in result:
        worst = max(v for v in r.deviation.values() if v is not None)
        good = worst <= args.tol and r.parity
        ok &= good
        print(f"round {r.round:3d}  n={r.n:6d}  max_dev={worst:.3e}  parity={r.parity}  {'PASS' if good else 'FAIL'}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {"fit": cmd_fit, "stream": cmd_stream, "bench": cmd_bench, "check": cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InckrrError, ValueError, OSError) as exc:
        print(f"inckrr: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
