"""
Hot inner loops: polynomial feature expansion and pairwise squared distances.

Each kernel exists twice, a numba ``@njit`` version and a pure-numpy version.
The dispatching names (``poly_features``, ``sq_distances``) bind to the numba
path unless numba is missing or ``INCKRR_DISABLE_NUMBA`` is set to a truthy
value before import. Both paths perform the same floating-point operations in
the same order for the feature map, so their outputs are bit-identical; the
distance kernels agree to rounding.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("INCKRR_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

# rows per block in the numpy distance path; bounds the (rows, m, M) temporary
_CHUNK = 256


# ------------------------------------------------------------------ numpy path


def poly_features_numpy(X, parent, var, scale):
    n = X.shape[0]
    J = parent.shape[0]
    F = np.empty((n, J))
    F[:, 0] = 1.0
    for t in range(1, J):
        np.multiply(F[:, parent[t]], X[:, var[t]], out=F[:, t])
    F *= scale
    return F


def sq_distances_numpy(X, Z):
    out = np.empty((X.shape[0], Z.shape[0]))
    for start in range(0, X.shape[0], _CHUNK):
        stop = min(start + _CHUNK, X.shape[0])
        diff = X[start:stop, None, :] - Z[None, :, :]
        out[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


# ------------------------------------------------------------------ numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def poly_features_numba(X, parent, var, scale):
        n = X.shape[0]
        J = parent.shape[0]
        F = np.empty((n, J))
        for i in range(n):
            F[i, 0] = 1.0
            for t in range(1, J):
                F[i, t] = F[i, parent[t]] * X[i, var[t]]
            for t in range(J):
                F[i, t] *= scale[t]
        return F

    @njit(cache=True)
    def sq_distances_numba(X, Z):
        n, M = X.shape
        m = Z.shape[0]
        out = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(M):
                    d = X[i, k] - Z[j, k]
                    acc += d * d
                out[i, j] = acc
        return out

else:  # pragma: no cover
    poly_features_numba = poly_features_numpy
    sq_distances_numba = sq_distances_numpy


if HAVE_NUMBA and not _DISABLED:
    BACKEND = "numba"
    poly_features = poly_features_numba
    sq_distances = sq_distances_numba
else:
    BACKEND = "numpy"
    poly_features = poly_features_numpy
    sq_distances = sq_distances_numpy
