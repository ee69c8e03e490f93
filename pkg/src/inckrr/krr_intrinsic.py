"""
Kernel ridge regression in intrinsic space (explicit polynomial features).

The model minimizes Σ (uᵀφ(x_i) + b − y_i)² + ρ‖u‖² and caches

    S⁻¹ = (ΦΦᵀ + ρI)⁻¹,   p = Φyᵀ,   s = Φeᵀ,   Σy,   n

together with the feature row of every stored sample. Edits of a whole batch
(additions C, removals R) update S⁻¹ with one Woodbury step; (u, b) are then
re-solved from the cached statistics in O(J²).
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
from .errors import BatchTooLarge, DimensionMismatch, EmptyModel, UnsupportedKernel
from .kernels import KernelSpec, feature_map

DEFAULT_RIDGE = 0.5


@dataclass(frozen=True, eq=False)
class IntrinsicModel:
    spec: KernelSpec
    ridge: float
    S_inv: np.ndarray
    p: np.ndarray
    s: np.ndarray
    y_sum: float
    n: int
    u: np.ndarray
    b: float
    X: np.ndarray
    features: np.ndarray  # (n, J), one row per stored sample
    y: np.ndarray
    ids: np.ndarray
    next_id: int
    edits_since_refresh: int = 0

    def __post_init__(self):
        freeze_arrays(self)

    @property
    def dim(self) -> int:
        return self.S_inv.shape[0]

    @property
    def params(self) -> np.ndarray:
        return np.append(self.u, self.b)


def solve_weights(S_inv, p, s, y_sum, n):
    """
    Solve the bordered system [[S, s], [sᵀ, n]] [u; b] = [p; Σy] using S⁻¹ only.

    The top-left block of the bordered inverse is
    M = S⁻¹ + S⁻¹s (n − sᵀS⁻¹s)⁻¹ sᵀS⁻¹, so u = M(p − s Σy/n) and
    b = (Σy − sᵀu)/n.
    """
    g = p - s * (y_sum / n)
    Sg = S_inv @ g
    Ss = S_inv @ s
    schur = n - float(s @ Ss)
    linalg._check_pivot(schur, float(n), "bias Schur complement")
    u = Sg + Ss * (float(s @ Sg) / schur)
    b = (y_sum - float(s @ u)) / n
    return u, b


def fit(X, y, spec: KernelSpec, ridge: float = DEFAULT_RIDGE, ids=None) -> IntrinsicModel:
    if not spec.has_feature_map:
        raise UnsupportedKernel("intrinsic space needs a polynomial kernel")
    if not ridge > 0:
        raise ValueError("ridge must be positive")
    X = np.array(np.atleast_2d(X), dtype=float)
    y = np.array(y, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise DimensionMismatch(f"{X.shape[0]} samples but {y.size} labels")
    if y.size < 1:
        raise EmptyModel("need at least one sample")
    ids = default_ids(y.size, ids)
    F = feature_map(spec, X)
    return _from_features(spec, float(ridge), X, F, y, ids, int(ids.max()) + 1)


def _from_features(spec, ridge, X, F, y, ids, next_id) -> IntrinsicModel:
    J = F.shape[1]
    S = F.T @ F
    S[np.diag_indices(J)] += ridge
    S_inv = linalg.spd_inverse(S, "ΦΦᵀ + ρI")
    p = F.T @ y
    s = F.sum(axis=0)
    y_sum = float(y.sum())
    u, b = solve_weights(S_inv, p, s, y_sum, y.size)
    return IntrinsicModel(spec, ridge, S_inv, p, s, y_sum, y.size, u, b, X, F, y, ids, next_id)


def batch_guard(model: IntrinsicModel, batch: EditBatch) -> Guard:
    """Advise a refit once |C| + |R| reaches J: the inner solve is then no smaller than S."""
    return Guard.ADVISE_REFIT if batch.size >= model.dim else Guard.PROCEED


def update(model: IntrinsicModel, batch: EditBatch) -> IntrinsicModel:
    if batch.is_empty():
        return model
    pos = positions_of(model.ids, batch.remove_ids)
    n_new = model.n + batch.n_add - batch.n_remove
    if n_new < 1:
        raise EmptyModel(f"edit would leave {n_new} samples")
    if batch_guard(model, batch) is Guard.ADVISE_REFIT:
        warnings.warn(
            f"batch of {batch.size} edits is not smaller than J={model.dim}; a refit is cheaper",
            BatchTooLarge,
            stacklevel=2,
        )
    add_ids, next_id = new_ids(batch, model.ids, model.next_id)
    F_C = feature_map(model.spec, batch.add_X) if batch.n_add else np.empty((0, model.dim))
    if F_C.shape[1] != model.dim:
        raise DimensionMismatch("added samples have the wrong dimension")
    F_R = model.features[pos]
    y_C, y_R = batch.add_y, model.y[pos]

    if batch.size == 1:
        v, sign = (F_C[0], 1) if batch.n_add else (F_R[0], -1)
        S_inv = linalg.rank1_update(model.S_inv, v, sign)
    else:
        S_inv = linalg.rankk_update(model.S_inv, F_C.T, F_R.T)
    p = model.p + F_C.T @ y_C - F_R.T @ y_R
    s = model.s + F_C.sum(axis=0) - F_R.sum(axis=0)
    y_sum = model.y_sum + float(y_C.sum()) - float(y_R.sum())

    keep = np.ones(model.n, dtype=bool)
    keep[pos] = False
    X = np.vstack([model.X[keep], batch.add_X.reshape(batch.n_add, model.X.shape[1])])
    features = np.vstack([model.features[keep], F_C])
    y = np.concatenate([model.y[keep], y_C])
    ids = np.concatenate([model.ids[keep], add_ids])

    edits = model.edits_since_refresh + 1
    if edits >= REFRESH_EVERY:
        return _from_features(model.spec, model.ridge, X, features, y, ids, next_id)
    u, b = solve_weights(S_inv, p, s, y_sum, n_new)
    return IntrinsicModel(
        model.spec, model.ridge, S_inv, p, s, y_sum, n_new, u, b, X, features, y, ids, next_id, edits
    )


def refresh(model: IntrinsicModel) -> IntrinsicModel:
    """Recompute every cached quantity from the stored samples."""
    return _from_features(
        model.spec, model.ridge, model.X, model.features, model.y, model.ids, model.next_id
    )


def predict(model: IntrinsicModel, X):
    single = np.ndim(X) == 1
    F = feature_map(model.spec, X)
    if F.shape[-1] != model.dim:
        raise DimensionMismatch("query has the wrong dimension")
    out = F @ model.u + model.b
    return float(out) if single else out


def classify(model: IntrinsicModel, X, threshold: float = 0.0):
    single = np.ndim(X) == 1
    labels = sign_labels(np.atleast_1d(predict(model, X)), threshold)
    return int(labels[0]) if single else labels
