"""Render stream results as JSON or CSV, with a per-strategy summary trailer."""

from __future__ import annotations

import csv
import io
import json
import math

from .stream import STRATEGIES, RoundReport, StreamResult

FIELDS = ("seconds", "log10_cumulative", "deviation", "accuracy")


def _strategies(reports) -> tuple[str, ...]:
    present = set(reports[0].seconds)
    return tuple(s for s in STRATEGIES if s in present)


def summary(reports) -> dict:
    """
    Mean single-round time per strategy and the improvement fold
    mean(single) / mean(batch), or None when either strategy is absent.
    """
    rounds = list(reports)
    strategies = _strategies(rounds)
    means = {s: sum(r.seconds[s] for r in rounds) / len(rounds) for s in strategies}
    fold = None
    if "batch" in means and "single" in means and means["batch"] > 0:
        fold = means["single"] / means["batch"]
    devs = [v for r in rounds for v in r.deviation.values() if v is not None]
    return {
        "mean_seconds": means,
        "improvement_fold": fold,
        "max_deviation": max(devs) if devs else None,
        "parity": all(r.parity for r in rounds),
    }


def _round_dict(r: RoundReport) -> dict:
    return {
        "round": r.round,
        "n": r.n,
        "n_add": r.n_add,
        "n_remove": r.n_remove,
        "seconds": r.seconds,
        "log10_cumulative": r.log10_cumulative,
        "deviation": r.deviation,
        "accuracy": {s: (None if math.isnan(a) else a) for s, a in r.accuracy.items()},
        "parity": r.parity,
    }


def to_json(reports) -> str:
    rounds = list(reports)
    if not rounds:
        raise ValueError("nothing to report")
    doc = {}
    if isinstance(reports, StreamResult):
        doc["run"] = {
            "space": reports.space,
            "kernel": reports.kernel,
            "n_initial": reports.n_initial,
            "n_test": reports.n_test,
            "initial_fit_seconds": reports.initial_fit_seconds,
        }
    doc["rounds"] = [_round_dict(r) for r in rounds]
    doc["trailer"] = summary(rounds)
    return json.dumps(doc, indent=2)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def to_csv(reports) -> str:
    """Header row, one row per round, then a ``mean`` trailer row."""
    rounds = list(reports)
    if not rounds:
        raise ValueError("nothing to report")
    strategies = _strategies(rounds)
    header = ["round", "n", "n_add", "n_remove"]
    header += [f"{f}_{s}" for s in strategies for f in FIELDS]
    header += ["parity", "improvement_fold"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rounds:
        row = [r.round, r.n, r.n_add, r.n_remove]
        for s in strategies:
            row += [_fmt(getattr(r, f)[s]) for f in FIELDS]
        row += [_fmt(r.parity), ""]
        w.writerow(row)
    summ = summary(rounds)
    trailer = ["mean", "", "", ""]
    for s in strategies:
        trailer += [_fmt(summ["mean_seconds"][s]), "", "", ""]
    trailer += [_fmt(summ["parity"]), _fmt(summ["improvement_fold"])]
    w.writerow(trailer)
    return buf.getvalue()


def report(reports, fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(reports)
    if fmt == "csv":
        return to_csv(reports)
    raise ValueError(f"unknown report format {fmt!r}")
