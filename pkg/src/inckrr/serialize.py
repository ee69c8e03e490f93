"""
Versioned JSON dumps of fitted models.

Floats are written with Python's shortest round-trip representation (at most
17 significant digits), so a dump/load cycle reproduces every cached array
bit-for-bit. Feature rows are not written; they are recomputed from the
stored samples on load.
"""

from __future__ import annotations

import json

import numpy as np

from . import kbr, krr_empirical, krr_intrinsic
from .kernels import KernelSpec, feature_map

FORMAT = "inckrr-model"
VERSION = 1


def _arr(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def to_dict(model) -> dict:
    if not isinstance(model, (krr_empirical.EmpiricalModel, krr_intrinsic.IntrinsicModel, kbr.BayesPosterior)):
        raise TypeError(f"cannot serialize {type(model).__name__}")
    head = {"format": FORMAT, "version": VERSION}
    common = {"spec": model.spec.to_dict(), "next_id": model.next_id}
    samples = {"samples": _samples(model.ids, model.X, model.y)}
    if isinstance(model, krr_empirical.EmpiricalModel):
        return head | {"kind": "empirical"} | common | {
            "ridge": model.ridge,
            "Q_inv": _arr(model.Q_inv),
            "a": _arr(model.a),
            "b": model.b,
            "edits_since_refresh": model.edits_since_refresh,
        } | samples
    if isinstance(model, krr_intrinsic.IntrinsicModel):
        return head | {"kind": "intrinsic"} | common | {
            "ridge": model.ridge,
            "S_inv": _arr(model.S_inv),
            "p": _arr(model.p),
            "s": _arr(model.s),
            "y_sum": model.y_sum,
            "n": model.n,
            "u": _arr(model.u),
            "b": model.b,
            "edits_since_refresh": model.edits_since_refresh,
        } | samples
    pr = model.prior
    return head | {"kind": "bayes"} | common | {
        "prior": {
            "sigma_u2": pr.sigma_u2,
            "sigma_b2": pr.sigma_b2,
            "mu_u": None if pr.mu_u is None else _arr(pr.mu_u),
        },
        "mu_post": _arr(model.mu_post),
        "Sigma_post": _arr(model.Sigma_post),
        "gram": _arr(model.gram),
        "xy": _arr(model.xy),
        "dim": model.X.shape[1],
    } | samples


def _samples(ids, X, y) -> dict:
    return {"ids": [int(i) for i in ids], "X": _arr(X), "y": _arr(y)}


def _unpack_samples(d: dict, M: int = 0):
    ids = np.asarray(d["ids"], dtype=np.int64)
    X = np.asarray(d["X"], dtype=float)
    if X.size == 0:
        X = X.reshape(0, M)
    return ids, X, np.asarray(d["y"], dtype=float)


def from_dict(d: dict):
    if d.get("format") != FORMAT:
        raise ValueError("not an inckrr model dump")
    if d.get("version") != VERSION:
        raise ValueError(f"unsupported model version {d.get('version')}")
    spec = KernelSpec.from_dict(d["spec"])
    ids, X, y = _unpack_samples(d["samples"], d.get("dim", 0))
    kind = d["kind"]
    if kind == "empirical":
        return krr_empirical.EmpiricalModel(
            spec, float(d["ridge"]), np.asarray(d["Q_inv"], dtype=float), X, y, ids,
            np.asarray(d["a"], dtype=float), float(d["b"]), int(d["next_id"]),
            int(d["edits_since_refresh"]),
        )
    if kind == "intrinsic":
        return krr_intrinsic.IntrinsicModel(
            spec, float(d["ridge"]), np.asarray(d["S_inv"], dtype=float),
            np.asarray(d["p"], dtype=float), np.asarray(d["s"], dtype=float),
            float(d["y_sum"]), int(d["n"]), np.asarray(d["u"], dtype=float), float(d["b"]),
            X, feature_map(spec, X), y, ids, int(d["next_id"]), int(d["edits_since_refresh"]),
        )
    if kind == "bayes":
        p = d["prior"]
        prior = kbr.BayesPrior(p["sigma_u2"], p["sigma_b2"], p["mu_u"])
        J = len(d["mu_post"])
        F = feature_map(spec, X) if y.size else np.empty((0, J))
        return kbr.BayesPosterior(
            spec, prior, np.asarray(d["mu_post"], dtype=float),
            np.asarray(d["Sigma_post"], dtype=float).reshape(J, J),
            np.asarray(d["gram"], dtype=float).reshape(J, J),
            np.asarray(d["xy"], dtype=float), X, F, y, ids, int(d["next_id"]),
        )
    raise ValueError(f"unknown model kind {kind!r}")


def dumps(model) -> str:
    return json.dumps(to_dict(model))


def loads(text: str):
    return from_dict(json.loads(text))


def save(model, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_dict(model), fh)


def load(path):
    with open(path) as fh:
        return from_dict(json.load(fh))
