"""
Kernelized Bayesian regression in intrinsic space.

Model: y_i = uᵀφ(x_i) + b_i with b_i ~ N(0, σ_b²) and prior u ~ N(μ_u, σ_u² I).
The posterior over u is Gaussian,

    Σ_post = (σ_u⁻² I + σ_b⁻² ΦΦᵀ)⁻¹
    μ_post = Σ_post (σ_u⁻² μ_u + σ_b⁻² Φyᵀ)

and the predictive distribution at x* is N(φ*ᵀμ_post, σ_b² + φ*ᵀΣ_post φ*).
Batch edits update Σ_post with a single Woodbury step on the scaled feature
columns φ/σ_b; the cached ΦΦᵀ and Φyᵀ are adjusted by the same increments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .edits import EditBatch, Guard, default_ids, freeze_arrays, new_ids, positions_of
from .errors import DimensionMismatch, UnsupportedKernel
from .kernels import KernelSpec, feature_map, intrinsic_dim

DEFAULT_VARIANCE = 0.01


@dataclass(frozen=True, eq=False)
class BayesPrior:
    sigma_u2: float = DEFAULT_VARIANCE
    sigma_b2: float = DEFAULT_VARIANCE
    mu_u: np.ndarray | None = None  # None means the zero vector
    mu_b: float = 0.0

    def __post_init__(self):
        if not self.sigma_u2 > 0 or not self.sigma_b2 > 0:
            raise ValueError("prior and noise variances must be positive")
        if self.mu_b != 0.0:
            raise ValueError("only a zero-mean noise model is supported")
        if self.mu_u is not None:
            mu = np.array(self.mu_u, dtype=float).ravel()
            mu.setflags(write=False)
            object.__setattr__(self, "mu_u", mu)

    def mean(self, J: int) -> np.ndarray:
        if self.mu_u is None:
            return np.zeros(J)
        if self.mu_u.size != J:
            raise DimensionMismatch(f"prior mean of length {self.mu_u.size}, J = {J}")
        return self.mu_u


@dataclass(frozen=True, eq=False)
class BayesPosterior:
    spec: KernelSpec
    prior: BayesPrior
    mu_post: np.ndarray
    Sigma_post: np.ndarray
    gram: np.ndarray  # ΦΦᵀ
    xy: np.ndarray  # Φyᵀ
    X: np.ndarray
    features: np.ndarray
    y: np.ndarray
    ids: np.ndarray
    next_id: int

    def __post_init__(self):
        freeze_arrays(self)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def dim(self) -> int:
        return self.mu_post.size

    @property
    def params(self) -> np.ndarray:
        return self.mu_post


@dataclass(frozen=True)
class PredictiveDist:
    mean: float | np.ndarray
    variance: float | np.ndarray

    @property
    def std(self):
        return np.sqrt(self.variance)


def _posterior_mean(prior: BayesPrior, Sigma_post, xy):
    mu_u = prior.mean(xy.size)
    return Sigma_post @ (mu_u / prior.sigma_u2 + xy / prior.sigma_b2)


def fit_posterior(X, y, prior: BayesPrior, spec: KernelSpec, ids=None, dim: int | None = None) -> BayesPosterior:
    """
    Posterior from scratch. With no samples the result is the prior itself;
    pass ``dim`` (the input dimension M) when X is empty and has no shape.
    """
    if not spec.has_feature_map:
        raise UnsupportedKernel("Bayesian regression runs in intrinsic space; RBF is not supported")
    y = np.array(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        M = dim if dim is not None else (X.shape[1] if X.ndim == 2 else None)
        if M is None:
            raise DimensionMismatch("input dimension unknown for an empty sample set")
        X = np.empty((0, M))
    X = np.atleast_2d(X)
    if X.shape[0] != y.size:
        raise DimensionMismatch(f"{X.shape[0]} samples but {y.size} labels")
    ids = default_ids(y.size, ids)
    F = feature_map(spec, X) if y.size else np.empty((0, intrinsic_dim(spec, X.shape[1])))
    next_id = int(ids.max()) + 1 if ids.size else 0
    return _from_features(spec, prior, X.copy(), F, y, ids, next_id)


def _from_features(spec, prior, X, F, y, ids, next_id) -> BayesPosterior:
    J = F.shape[1]
    gram = F.T @ F
    xy = F.T @ y
    precision = gram / prior.sigma_b2
    precision[np.diag_indices(J)] += 1.0 / prior.sigma_u2
    Sigma = linalg.spd_inverse(linalg.symmetrize(precision), "posterior precision")
    mu = _posterior_mean(prior, Sigma, xy)
    return BayesPosterior(spec, prior, mu, Sigma, linalg.symmetrize(gram), xy, X, F, y, ids, next_id)


def batch_guard(post: BayesPosterior, batch: EditBatch) -> Guard:
    return Guard.ADVISE_REFIT if batch.size >= post.dim else Guard.PROCEED


def update_posterior(post: BayesPosterior, batch: EditBatch) -> BayesPosterior:
    if batch.is_empty():
        return post
    pos = positions_of(post.ids, batch.remove_ids)
    add_ids, next_id = new_ids(batch, post.ids, post.next_id)
    F_C = feature_map(post.spec, batch.add_X) if batch.n_add else np.empty((0, post.dim))
    if F_C.shape[1] != post.dim:
        raise DimensionMismatch("added samples have the wrong dimension")
    F_R = post.features[pos]
    y_C, y_R = batch.add_y, post.y[pos]

    scale = 1.0 / np.sqrt(post.prior.sigma_b2)
    if batch.size == 1:
        v, sign = (F_C[0], 1) if batch.n_add else (F_R[0], -1)
        Sigma = linalg.rank1_update(post.Sigma_post, v * scale, sign)
    else:
        Sigma = linalg.rankk_update(post.Sigma_post, F_C.T * scale, F_R.T * scale)
    gram = linalg.symmetrize(post.gram + F_C.T @ F_C - F_R.T @ F_R)
    xy = post.xy + F_C.T @ y_C - F_R.T @ y_R
    mu = _posterior_mean(post.prior, Sigma, xy)

    keep = np.ones(post.n, dtype=bool)
    keep[pos] = False
    return BayesPosterior(
        post.spec,
        post.prior,
        mu,
        Sigma,
        gram,
        xy,
        np.vstack([post.X[keep], batch.add_X.reshape(batch.n_add, post.X.shape[1])]),
        np.vstack([post.features[keep], F_C]),
        np.concatenate([post.y[keep], y_C]),
        np.concatenate([post.ids[keep], add_ids]),
        next_id,
    )


def with_prior(post: BayesPosterior, prior: BayesPrior) -> BayesPosterior:
    """Swap in a new prior, keeping the data; needs one J×J inversion."""
    return _from_features(post.spec, prior, post.X, post.features, post.y, post.ids, post.next_id)


def predict_distribution(post: BayesPosterior, X) -> PredictiveDist:
    single = np.ndim(X) == 1
    F = np.atleast_2d(feature_map(post.spec, X))
    if F.shape[1] != post.dim:
        raise DimensionMismatch("query has the wrong dimension")
    mean = F @ post.mu_post
    var = post.prior.sigma_b2 + ((F @ post.Sigma_post) * F).sum(axis=1)
    if single:
        return PredictiveDist(float(mean[0]), float(var[0]))
    return PredictiveDist(mean, var)


def predict(post: BayesPosterior, X):
    """Posterior predictive mean only."""
    return predict_distribution(post, X).mean
