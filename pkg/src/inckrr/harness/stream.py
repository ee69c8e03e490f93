"""
Replay a stream of sample edits against the update strategies.

Each round draws ``adds_per_round`` samples from a held-back pool and
``removes_per_round`` current members, then applies the edit with

* ``batch``   one combined update of the whole round,
* ``single``  one update per sample (all additions, then all removals),
* ``refit``   a fit from scratch on the edited sample set.

Only model-update time is measured. Every chained model is compared with a
from-scratch fit of the same sample set, and all strategies are scored by
sign accuracy on a fixed test split.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .. import kbr, krr_empirical, krr_intrinsic
from ..edits import EditBatch, positions_of, relative_deviation, sign_labels
from ..errors import InckrrError, PlanExhausted
from ..kernels import KernelSpec
from .data import Dataset

STRATEGIES = ("batch", "single", "refit")
SPACES = ("intrinsic", "empirical", "bayes")


@dataclass(frozen=True)
class StreamPlan:
    rounds: int = 10
    adds_per_round: int = 4
    removes_per_round: int = 2
    seed: int = 0
    strategy: str = "all"
    space: str = "empirical"
    # share of the non-test samples that seeds the model; the rest is the add pool
    initial_fraction: float = 0.8
    test_fraction: float = 0.2
    n_initial: int | None = None
    verify: bool = True

    def __post_init__(self):
        if self.strategy not in STRATEGIES + ("all",):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.space not in SPACES:
            raise ValueError(f"unknown space {self.space!r}")
        if self.adds_per_round < 0 or self.removes_per_round < 0 or self.rounds < 0:
            raise ValueError("rounds and per-round edit counts must be non-negative")
        if not 0.0 < self.initial_fraction <= 1.0:
            raise ValueError("initial_fraction must lie in (0, 1]")
        if not 0.0 <= self.test_fraction < 1.0:
            raise ValueError("test_fraction must lie in [0, 1)")

    @property
    def strategies(self) -> tuple[str, ...]:
        return STRATEGIES if self.strategy == "all" else (self.strategy,)


@dataclass
class RoundReport:
    round: int
    n: int
    n_add: int
    n_remove: int
    seconds: dict[str, float]
    log10_cumulative: dict[str, float | None]
    deviation: dict[str, float | None]
    accuracy: dict[str, float]
    parity: bool


@dataclass
class StreamResult:
    """Per-round reports plus the one-off initial fit, which no round includes."""

    rounds: list[RoundReport]
    initial_fit_seconds: float
    n_initial: int
    n_test: int
    space: str
    kernel: str
    strategies: tuple[str, ...] = field(default=STRATEGIES)

    def __iter__(self):
        return iter(self.rounds)

    def __len__(self):
        return len(self.rounds)

    def __getitem__(self, i):
        return self.rounds[i]


class SpaceOps(NamedTuple):
    fit: Callable
    update: Callable
    predict: Callable
    deviation: Callable


def _aligned_params(model, ref):
    """Parameters of ``model`` reordered to match ``ref``'s sample order."""
    if isinstance(model, krr_empirical.EmpiricalModel):
        perm = positions_of(model.ids, ref.ids)
        return np.append(model.a[perm], model.b)
    return model.params


def _krr_deviation(model, ref) -> float:
    return relative_deviation(_aligned_params(model, ref), ref.params)


def _bayes_deviation(post, ref) -> float:
    return max(
        relative_deviation(post.mu_post, ref.mu_post),
        relative_deviation(post.Sigma_post, ref.Sigma_post),
    )


def space_ops(space: str, spec: KernelSpec, ridge: float = 0.5, prior: kbr.BayesPrior | None = None) -> SpaceOps:
    if space == "intrinsic":
        return SpaceOps(
            lambda X, y, ids: krr_intrinsic.fit(X, y, spec, ridge, ids=ids),
            krr_intrinsic.update,
            krr_intrinsic.predict,
            _krr_deviation,
        )
    if space == "empirical":
        return SpaceOps(
            lambda X, y, ids: krr_empirical.fit(X, y, spec, ridge, ids=ids),
            krr_empirical.update,
            krr_empirical.predict,
            _krr_deviation,
        )
    if space == "bayes":
        prior = prior or kbr.BayesPrior()
        return SpaceOps(
            lambda X, y, ids: kbr.fit_posterior(X, y, prior, spec, ids=ids, dim=X.shape[1]),
            kbr.update_posterior,
            kbr.predict,
            _bayes_deviation,
        )
    raise ValueError(f"unknown space {space!r}")


def run_stream(
    dataset: Dataset,
    plan: StreamPlan,
    spec: KernelSpec,
    ridge: float = 0.5,
    prior: kbr.BayesPrior | None = None,
    edits: list[EditBatch] | None = None,
) -> StreamResult:
    """
    Run ``plan`` on ``dataset``.

    ``edits`` replaces the random draws with an explicit list of batches
    (ids must refer to dataset samples); the test split is still drawn.
    """
    ops = space_ops(plan.space, spec, ridge, prior)
    rng = np.random.default_rng(plan.seed)
    row_of = {int(i): r for r, i in enumerate(dataset.ids)}

    perm = rng.permutation(dataset.n)
    n_test = int(round(plan.test_fraction * dataset.n))
    test_rows, rest = perm[:n_test], perm[n_test:]
    n0 = plan.n_initial if plan.n_initial is not None else int(round(plan.initial_fraction * rest.size))
    if not 1 <= n0 <= rest.size:
        raise ValueError(f"initial training size {n0} does not fit {rest.size} non-test samples")
    members = [int(i) for i in dataset.ids[rest[:n0]]]
    pool = [int(i) for i in dataset.ids[rest[n0:]]]
    X_test = dataset.X[test_rows]
    y_test = sign_labels(dataset.y[test_rows])

    def data_for(ids):
        rows = [row_of[i] for i in ids]
        return dataset.X[rows], dataset.y[rows], np.asarray(ids, dtype=np.int64)

    t0 = time.perf_counter()
    initial = ops.fit(*data_for(members))
    initial_seconds = time.perf_counter() - t0

    strategies = plan.strategies
    chains = {s: initial for s in strategies}
    cumulative = dict.fromkeys(strategies, 0.0)
    reports = []
    n_rounds = len(edits) if edits is not None else plan.rounds

    for r in range(1, n_rounds + 1):
        try:
            if edits is not None:
                batch = edits[r - 1]
            else:
                batch = _draw_batch(rng, plan, members, pool, data_for, r)
            removed = set(batch.remove_ids)
            members = [m for m in members if m not in removed]
            members += [int(i) for i in batch.add_ids] if batch.add_ids is not None else []
            reports.append(
                _play_round(r, ops, plan, strategies, chains, cumulative, batch, members, data_for, X_test, y_test)
            )
        except InckrrError as exc:
            exc.round_index = r
            exc.args = (f"round {r}: {exc.args[0] if exc.args else ''}",) + exc.args[1:]
            raise

    return StreamResult(reports, initial_seconds, n0, n_test, plan.space, spec.label(), strategies)


def _draw_batch(rng, plan, members, pool, data_for, r) -> EditBatch:
    if plan.adds_per_round > len(pool):
        raise PlanExhausted(f"only {len(pool)} samples left to add, round needs {plan.adds_per_round}")
    if plan.removes_per_round >= len(members):
        raise ValueError(f"round {r}: cannot remove {plan.removes_per_round} of {len(members)} samples")
    add = [pool.pop(0) for _ in range(plan.adds_per_round)]
    rem = rng.choice(np.asarray(members), size=plan.removes_per_round, replace=False)
    X_C, y_C, ids_C = data_for(add)
    return EditBatch(X_C, y_C, ids_C, tuple(int(i) for i in rem))


def _play_round(r, ops, plan, strategies, chains, cumulative, batch, members, data_for, X_test, y_test):
    seconds = {}
    for s in strategies:
        model = chains[s]
        if s == "batch":
            t0 = time.perf_counter()
            model = ops.update(model, batch)
            dt = time.perf_counter() - t0
        elif s == "single":
            t0 = time.perf_counter()
            for one in batch.singles():
                model = ops.update(model, one)
            dt = time.perf_counter() - t0
        else:
            data = data_for(members)
            t0 = time.perf_counter()
            model = ops.fit(*data)
            dt = time.perf_counter() - t0
        chains[s] = model
        seconds[s] = dt
        cumulative[s] += dt

    oracle = chains.get("refit")
    if oracle is None and plan.verify:
        oracle = ops.fit(*data_for(members))
    deviation = {s: (None if oracle is None else ops.deviation(chains[s], oracle)) for s in strategies}

    labels = {s: sign_labels(ops.predict(chains[s], X_test)) for s in strategies}
    accuracy = {s: float(np.mean(labels[s] == y_test)) if y_test.size else float("nan") for s in strategies}
    first = labels[strategies[0]]
    parity = all(np.array_equal(first, labels[s]) for s in strategies)

    return RoundReport(
        round=r,
        n=len(members),
        n_add=batch.n_add,
        n_remove=batch.n_remove,
        seconds=seconds,
        log10_cumulative={s: (math.log10(c) if c > 0 else None) for s, c in cumulative.items()},
        deviation=deviation,
        accuracy=accuracy,
        parity=parity,
    )


def max_deviation(result: StreamResult) -> float:
    vals = [v for rep in result for v in rep.deviation.values() if v is not None]
    return max(vals, default=0.0)
