"""Datasets: file ingestion and seeded synthetic two-class data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionConflict, ParseError

FORMATS = ("dense-csv", "sparse-text")

# synthetic shapes for the two regimes: many samples / few features, and the reverse
PRESETS = {
    "tall": {"n": 5000, "M": 6},
    "wide": {"n": 400, "M": 50},
}


@dataclass(frozen=True, eq=False)
class Dataset:
    ids: np.ndarray
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != self.y.size or self.ids.size != self.y.size:
            raise ValueError("ids, X rows and y must have matching lengths")
        if np.unique(self.ids).size != self.ids.size:
            raise ValueError("sample ids must be unique")

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def M(self) -> int:
        return self.X.shape[1]


def _number(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", lineno)
    return v


def _parse_dense(lines):
    rows, labels, width = [], [], None
    for lineno, line in lines:
        fields = [f.strip() for f in line.split(",")]
        vals = [_number(f, lineno) for f in fields]
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ParseError(f"expected {width} fields, found {len(vals)}", lineno)
        labels.append(vals[0])
        rows.append(vals[1:])
    return np.asarray(rows, dtype=float).reshape(len(rows), (width or 1) - 1), labels


def _parse_sparse(lines, dim: int | None):
    entries, labels, seen = [], [], 0
    for lineno, line in lines:
        toks = line.split()
        labels.append(_number(toks[0], lineno))
        row = {}
        for tok in toks[1:]:
            idx, sep, val = tok.partition(":")
            if not sep or not idx.isdigit():
                raise ParseError(f"expected index:value, found {tok!r}", lineno)
            k = int(idx)
            if k < 1:
                raise ParseError("indices are 1-based", lineno)
            if dim is not None and k > dim:
                raise DimensionConflict(f"index {k} exceeds the forced dimension {dim}", lineno)
            row[k - 1] = _number(val, lineno)
            seen = max(seen, k)
        entries.append(row)
    M = dim if dim is not None else seen
    X = np.zeros((len(entries), M))
    for i, row in enumerate(entries):
        for k, v in row.items():
            X[i, k] = v
    return X, labels


def ingest(path, fmt: str = "dense-csv", dim: int | None = None) -> Dataset:
    """
    Read a labelled dataset.

    ``dense-csv``: one sample per line, ``label, x1, x2, ...``.
    ``sparse-text``: ``label idx:val idx:val ...`` with 1-based indices;
    missing indices are zero and the dimension is the largest index seen
    unless ``dim`` forces it. Blank lines are skipped.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    with open(path) as fh:
        lines = [(i, ln.strip()) for i, ln in enumerate(fh, start=1) if ln.strip()]
    if not lines:
        raise ParseError("no samples")
    if fmt == "dense-csv":
        X, labels = _parse_dense(lines)
        if dim is not None and dim != X.shape[1]:
            raise DimensionConflict(f"file has {X.shape[1]} features, dimension forced to {dim}")
    else:
        X, labels = _parse_sparse(lines, dim)
    y = np.asarray(labels, dtype=float)
    return Dataset(np.arange(y.size, dtype=np.int64), X, y)


def synthesize(n: int, M: int, noise_sigma: float = 1.0, seed: int = 0) -> Dataset:
    """
    Two Gaussian classes labelled ±1 with isotropic noise ``noise_sigma``.

    The class means sit at ±2σ·v for a seeded random unit vector v, so they are
    4σ apart and the Bayes-optimal linear rule is right about 97.7% of the time.
    """
    if n < 1 or M < 1:
        raise ValueError("need n >= 1 and M >= 1")
    rng = np.random.default_rng(seed)
    v = rng.normal(size=M)
    v /= np.linalg.norm(v)
    y = rng.choice(np.array([-1.0, 1.0]), size=n)
    X = y[:, None] * (2.0 * noise_sigma) * v + noise_sigma * rng.normal(size=(n, M))
    return Dataset(np.arange(n, dtype=np.int64), X, y)
