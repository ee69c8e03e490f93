"""
Kernel ridge regression in empirical (dual) space.

Caches Q⁻¹ = (K + ρI)⁻¹ over the stored samples and derives

    b = y Q⁻¹ e / (e Q⁻¹ e),     a = Q⁻¹ (y − b e)

A batch edit first deletes the removed rows/columns from Q⁻¹ and then
borders it with the added samples, so no N×N inverse is recomputed. Works
with any kernel, including RBF.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .edits import (
    REFRESH_EVERY,
    EditBatch,
    Guard,
    default_ids,
    freeze_arrays,
    new_ids,
    positions_of,
    sign_labels,
)
from .errors import BatchTooLarge, DimensionMismatch, EmptyModel
from .kernels import KernelSpec, kernel_cross

DEFAULT_RIDGE = 0.5
# relative residual of the appended rows above which Q⁻¹ is rebuilt
DRIFT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EmpiricalModel:
    spec: KernelSpec
    ridge: float
    Q_inv: np.ndarray
    X: np.ndarray
    y: np.ndarray
    ids: np.ndarray
    a: np.ndarray
    b: float
    next_id: int
    edits_since_refresh: int = 0

    def __post_init__(self):
        freeze_arrays(self)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def params(self) -> np.ndarray:
        return np.append(self.a, self.b)


def solve_dual(Q_inv: np.ndarray, y: np.ndarray):
    Qe = Q_inv.sum(axis=1)
    denom = float(Qe.sum())
    linalg._check_pivot(denom, 0.0, "e Q⁻¹ eᵀ")
    b = float(y @ Qe) / denom
    a = Q_inv @ (y - b)
    return a, b


def fit(X, y, spec: KernelSpec, ridge: float = DEFAULT_RIDGE, ids=None) -> EmpiricalModel:
    if not ridge > 0:
        raise ValueError("ridge must be positive")
    X = np.array(np.atleast_2d(X), dtype=float)
    y = np.array(y, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise DimensionMismatch(f"{X.shape[0]} samples but {y.size} labels")
    if y.size < 1:
        raise EmptyModel("need at least one sample")
    ids = default_ids(y.size, ids)
    return _build(spec, float(ridge), X, y, ids, int(ids.max()) + 1)


def _build(spec, ridge, X, y, ids, next_id) -> EmpiricalModel:
    Q = kernel_cross(spec, X, X)
    Q[np.diag_indices(y.size)] += ridge
    Q_inv = linalg.spd_inverse(linalg.symmetrize(Q), "K + ρI")
    a, b = solve_dual(Q_inv, y)
    return EmpiricalModel(spec, ridge, Q_inv, X, y, ids, a, b, next_id)


def kernel_matmul(spec: KernelSpec, X: np.ndarray, B: np.ndarray, ridge: float, chunk: int = 1024) -> np.ndarray:
    """(K(X, X) + ρI) @ B, built a block of rows at a time."""
    out = np.empty_like(B)
    for start in range(0, X.shape[0], chunk):
        stop = min(start + chunk, X.shape[0])
        out[start:stop] = kernel_cross(spec, X[start:stop], X) @ B
    out += ridge * B
    return out


def batch_guard(model: EmpiricalModel, batch: EditBatch) -> Guard:
    """Advise a refit when fewer samples survive than are removed (n − |R| < |R|)."""
    r = batch.n_remove
    return Guard.ADVISE_REFIT if model.n - r < r else Guard.PROCEED


def update(model: EmpiricalModel, batch: EditBatch) -> EmpiricalModel:
    if batch.is_empty():
        return model
    pos = positions_of(model.ids, batch.remove_ids)
    if batch.n_remove >= model.n and batch.n_add == 0:
        raise EmptyModel("edit would remove every sample")
    if batch.n_add and batch.add_X.shape[1] != model.X.shape[1]:
        raise DimensionMismatch("added samples have the wrong dimension")
    add_ids, next_id = new_ids(batch, model.ids, model.next_id)

    keep = np.ones(model.n, dtype=bool)
    keep[pos] = False
    X_keep = model.X[keep]
    X_C = batch.add_X.reshape(batch.n_add, model.X.shape[1])
    X = np.vstack([X_keep, X_C])
    y = np.concatenate([model.y[keep], batch.add_y])
    ids = np.concatenate([model.ids[keep], add_ids])

    if batch_guard(model, batch) is Guard.ADVISE_REFIT:
        warnings.warn(
            f"removing {batch.n_remove} of {model.n} samples; refitting directly",
            BatchTooLarge,
            stacklevel=2,
        )
        return _build(model.spec, model.ridge, X, y, ids, next_id)

    Q_inv = linalg.block_inverse_remove(model.Q_inv, pos)
    if batch.n_add:
        eta = kernel_cross(model.spec, X_keep, X_C)
        corner = kernel_cross(model.spec, X_C, X_C)
        corner[np.diag_indices(batch.n_add)] += model.ridge
        Q_inv = linalg.block_inverse_append(
            Q_inv,
            eta,
            linalg.symmetrize(corner),
            Q_matmul=lambda B: kernel_matmul(model.spec, X_keep, B, model.ridge),
        )

    edits = model.edits_since_refresh + 1
    if edits >= REFRESH_EVERY:
        return _build(model.spec, model.ridge, X, y, ids, next_id)
    a, b = solve_dual(Q_inv, y)
    if batch.n_add:
        # rows of Q a = y − b e for the new samples, from kernel blocks already at hand
        m = X_keep.shape[0]
        resid = eta.T @ a[:m] + corner @ a[m:] - (batch.add_y - b)
        if np.max(np.abs(resid)) > DRIFT_TOL * (1.0 + np.max(np.abs(y))):
            return _build(model.spec, model.ridge, X, y, ids, next_id)
    return EmpiricalModel(model.spec, model.ridge, Q_inv, X, y, ids, a, b, next_id, edits)


def refresh(model: EmpiricalModel) -> EmpiricalModel:
    return _build(model.spec, model.ridge, model.X, model.y, model.ids, model.next_id)


def predict(model: EmpiricalModel, X):
    single = np.ndim(X) == 1
    Xq = np.atleast_2d(np.asarray(X, dtype=float))
    if Xq.shape[1] != model.X.shape[1]:
        raise DimensionMismatch(f"query of dimension {Xq.shape[1]}, model has {model.X.shape[1]}")
    out = kernel_cross(model.spec, Xq, model.X) @ model.a + model.b
    return float(out[0]) if single else out


def classify(model: EmpiricalModel, X, threshold: float = 0.0):
    """±1 labels from the sign of ``predict − threshold``; ties go to +1."""
    single = np.ndim(X) == 1
    labels = sign_labels(np.atleast_1d(predict(model, X)), threshold)
    return int(labels[0]) if single else labels
