"""Edit batches and the bookkeeping shared by every incremental model."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, UnknownSample

# full re-inversion after this many applied edits, to bound drift
REFRESH_EVERY = 1000


class Guard(str, enum.Enum):
    PROCEED = "proceed"
    ADVISE_REFIT = "advise_refit"


@dataclass(frozen=True)
class EditBatch:
    """One round of edits: samples to add (C) and sample ids to remove (R).

    ``add_ids`` may be omitted, in which case the model assigns fresh ids.
    """

    add_X: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    add_y: np.ndarray = field(default_factory=lambda: np.empty(0))
    add_ids: np.ndarray | None = None
    remove_ids: tuple = ()

    def __post_init__(self):
        X = np.asarray(self.add_X, dtype=float)
        if X.ndim == 1:
            X = X[None, :] if X.size else X.reshape(0, 0)
        y = np.asarray(self.add_y, dtype=float).ravel()
        if X.shape[0] != y.size:
            raise DimensionMismatch(f"{X.shape[0]} added samples but {y.size} labels")
        object.__setattr__(self, "add_X", X)
        object.__setattr__(self, "add_y", y)
        if self.add_ids is not None:
            ids = np.asarray(self.add_ids, dtype=np.int64).ravel()
            if ids.size != y.size:
                raise DimensionMismatch(f"{ids.size} ids for {y.size} added samples")
            object.__setattr__(self, "add_ids", ids)
        object.__setattr__(self, "remove_ids", tuple(int(i) for i in self.remove_ids))

    @property
    def n_add(self) -> int:
        return self.add_y.size

    @property
    def n_remove(self) -> int:
        return len(self.remove_ids)

    @property
    def size(self) -> int:
        return self.n_add + self.n_remove

    def is_empty(self) -> bool:
        return self.size == 0

    def singles(self) -> list["EditBatch"]:
        """Split into one-sample batches: every addition first, then every removal."""
        out = []
        for i in range(self.n_add):
            ids = None if self.add_ids is None else self.add_ids[i : i + 1]
            out.append(EditBatch(self.add_X[i : i + 1], self.add_y[i : i + 1], ids))
        out.extend(EditBatch(remove_ids=(r,)) for r in self.remove_ids)
        return out


def positions_of(ids: np.ndarray, wanted) -> np.ndarray:
    """Positions of ``wanted`` ids inside ``ids``, in the order requested."""
    wanted = list(wanted)
    if len(set(wanted)) != len(wanted):
        raise UnknownSample("duplicate id in removal set")
    lookup = {int(v): i for i, v in enumerate(ids)}
    try:
        return np.array([lookup[int(w)] for w in wanted], dtype=np.intp)
    except KeyError as exc:
        raise UnknownSample(f"no stored sample with id {exc.args[0]}") from None


def new_ids(batch: EditBatch, current: np.ndarray, next_id: int) -> tuple[np.ndarray, int]:
    """Ids for the batch's additions and the updated id counter."""
    if batch.add_ids is None:
        ids = np.arange(next_id, next_id + batch.n_add, dtype=np.int64)
    else:
        ids = batch.add_ids
        if np.unique(ids).size != ids.size or np.isin(ids, current).any():
            raise UnknownSample("added ids must be fresh and unique")
    nxt = max(next_id, int(ids.max()) + 1) if ids.size else next_id
    return ids, nxt


def default_ids(n: int, ids=None) -> np.ndarray:
    if ids is None:
        return np.arange(n, dtype=np.int64)
    ids = np.array(ids, dtype=np.int64).ravel()
    if ids.size != n or np.unique(ids).size != n:
        raise DimensionMismatch("ids must be unique, one per sample")
    return ids


def sign_labels(scores, threshold: float = 0.0) -> np.ndarray:
    """Map scores to ±1; a score exactly at the threshold maps to +1."""
    return np.where(np.asarray(scores) - threshold >= 0.0, 1, -1)


def relative_deviation(a, b) -> float:
    """max|a − b| / max(max|b|, tiny); the norm-wise relative error of a against b."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"parameter vectors of size {a.size} and {b.size}")
    if a.size == 0:
        return 0.0
    scale = max(float(np.max(np.abs(b))), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b))) / scale


def freeze_arrays(obj) -> None:
    """Mark every ndarray attribute of a model read-only."""
    for value in vars(obj).values():
        if isinstance(value, np.ndarray):
            value.setflags(write=False)
