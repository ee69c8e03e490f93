"""
Kernel functions and the explicit polynomial feature map.

Two families are supported:

    poly(d):  K(x, z) = (1 + x·z)^d
    rbf(r):   K(x, z) = exp(−‖x − z‖² / (2 r²))

For ``poly`` the feature map φ enumerates every monomial of total degree
≤ d in graded lexicographic order, each scaled by the square root of its
multinomial coefficient, so that φ(x)·φ(z) == K(x, z). The first feature is
the constant 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel
from .errors import DimensionMismatch, UnsupportedKernel

DEFAULT_RADIUS = 50.0


@dataclass(frozen=True)
class KernelSpec:
    family: str
    degree: int = 2
    radius: float = DEFAULT_RADIUS

    def __post_init__(self):
        if self.family == "poly":
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValueError(f"polynomial degree must be a positive integer, got {self.degree}")
        elif self.family == "rbf":
            if not self.radius > 0:
                raise ValueError(f"RBF radius must be positive, got {self.radius}")
        else:
            raise ValueError(f"unknown kernel family {self.family!r}")

    @classmethod
    def poly(cls, degree: int) -> "KernelSpec":
        return cls("poly", degree=degree)

    @classmethod
    def rbf(cls, radius: float = DEFAULT_RADIUS) -> "KernelSpec":
        return cls("rbf", radius=radius)

    @classmethod
    def parse(cls, name: str, radius: float = DEFAULT_RADIUS) -> "KernelSpec":
        """Parse the command-line names ``poly2``, ``poly3`` (any ``polyN``) and ``rbf``."""
        name = name.strip().lower()
        if name == "rbf":
            return cls.rbf(radius)
        if name.startswith("poly") and name[4:].isdigit():
            return cls.poly(int(name[4:]))
        raise ValueError(f"unknown kernel {name!r}")

    @property
    def has_feature_map(self) -> bool:
        return self.family == "poly"

    def label(self) -> str:
        return f"poly{self.degree}" if self.family == "poly" else f"rbf(r={self.radius:g})"

    def to_dict(self) -> dict:
        if self.family == "poly":
            return {"family": "poly", "degree": int(self.degree)}
        return {"family": "rbf", "radius": float(self.radius)}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        if d["family"] == "poly":
            return cls.poly(int(d["degree"]))
        return cls.rbf(float(d["radius"]))


def kernel_eval(spec: KernelSpec, x, z) -> float:
    x = np.asarray(x, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if x.shape != z.shape:
        raise DimensionMismatch(f"vectors of length {x.size} and {z.size}")
    if spec.family == "poly":
        return float((1.0 + x @ z) ** spec.degree)
    d = x - z
    return float(np.exp(-(d @ d) / (2.0 * spec.radius**2)))


def intrinsic_dim(spec: KernelSpec, M: int) -> int:
    """Number of monomials of degree ≤ d in M variables, C(M + d, d)."""
    if not spec.has_feature_map:
        raise UnsupportedKernel("RBF kernels have no finite intrinsic space")
    return math.comb(M + spec.degree, spec.degree)


@lru_cache(maxsize=32)
def _monomial_table(M: int, degree: int):
    """
    Recurrence tables for the graded-lex monomial basis.

    Monomial t (t ≥ 1) is monomial ``parent[t]`` times variable ``var[t]``;
    ``scale[t]`` is sqrt(d! / ((d − |α|)! ∏ α_i!)).
    """
    index = {(): 0}
    parent = [0]
    var = [0]
    scale = [1.0]
    fact = math.factorial
    for k in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(range(M), k):
            index[combo] = len(parent)
            parent.append(index[combo[:-1]])
            var.append(combo[-1])
            denom = fact(degree - k)
            for c in set(combo):
                denom *= fact(combo.count(c))
            scale.append(math.sqrt(fact(degree) / denom))
    tables = (
        np.asarray(parent, dtype=np.int64),
        np.asarray(var, dtype=np.int64),
        np.asarray(scale, dtype=float),
    )
    for arr in tables:
        arr.setflags(write=False)
    return tables


def _as_samples(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionMismatch(f"samples must be 1-D or 2-D, got shape {X.shape}")
    return np.ascontiguousarray(X)


def feature_map(spec: KernelSpec, X) -> np.ndarray:
    """
    Explicit intrinsic-space features.

    A single vector of length M maps to a vector of length J; a sample matrix
    of shape (n, M) maps to (n, J), one feature row per sample.
    """
    if not spec.has_feature_map:
        raise UnsupportedKernel("RBF kernels have no finite intrinsic space")
    single = np.ndim(X) == 1
    X = _as_samples(X)
    parent, var, scale = _monomial_table(X.shape[1], int(spec.degree))
    F = _accel.poly_features(X, parent, var, scale)
    return F[0] if single else F


def kernel_cross(spec: KernelSpec, X, Z) -> np.ndarray:
    """Cross block with entry (i, j) = K(X_i, Z_j); either side may be empty."""
    X = _as_samples(X)
    Z = _as_samples(Z)
    if X.shape[0] and Z.shape[0] and X.shape[1] != Z.shape[1]:
        raise DimensionMismatch(f"sample dimensions {X.shape[1]} and {Z.shape[1]}")
    if X.shape[0] == 0 or Z.shape[0] == 0:
        return np.empty((X.shape[0], Z.shape[0]))
    if spec.family == "poly":
        return (1.0 + X @ Z.T) ** spec.degree
    return np.exp(_accel.sq_distances(X, Z) / (-2.0 * spec.radius**2))
