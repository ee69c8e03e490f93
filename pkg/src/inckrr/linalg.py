"""
Inverse-caching update primitives.

Every model in the package keeps the inverse of a symmetric positive
definite matrix and edits it in place of re-inverting:

* ``rank1_update``            (S ± v vᵀ)⁻¹ from S⁻¹ (Sherman-Morrison)
* ``rankk_update``            (S + C Cᵀ − R Rᵀ)⁻¹ from S⁻¹ in one Woodbury step
* ``block_inverse_append``    inverse of the bordered matrix [[Q, η], [ηᵀ, Q_CC]]
* ``block_inverse_remove``    inverse of Q with a set of rows/columns deleted

Matrices are plain ``float64`` ndarrays. Column blocks have shape
``(order, k)`` with ``k == 0`` allowed. All functions are pure: inputs are
never written to, and returned matrices are exactly symmetric.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, IndexOutOfRange, SingularPivot

PIVOT_TOL = 1e-12


def symmetrize(A: np.ndarray) -> np.ndarray:
    """Return (A + Aᵀ)/2, which is symmetric bit-for-bit."""
    return 0.5 * (A + A.T)


def _check_pivot(pivot: float, scale: float, what: str) -> None:
    if not np.isfinite(pivot) or abs(pivot) <= PIVOT_TOL * (1.0 + scale):
        raise SingularPivot(f"{what}: pivot {pivot:.3e} below tolerance (scale {scale:.3e})")


def _lu(A: np.ndarray, what: str):
    """Pivoted LU of a small square matrix, refusing singular ones."""
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if not np.all(np.isfinite(A)):
        raise SingularPivot(f"{what}: non-finite entries")
    with warnings.catch_warnings():
        # exact zeros are reported below as SingularPivot
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    d = np.abs(np.diag(lu))
    k = int(np.argmin(d))
    _check_pivot(float(lu[k, k]), scale, what)
    return lu, piv


def spd_inverse(A: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Invert a symmetric positive definite matrix through its Cholesky factor."""
    try:
        c = sla.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularPivot(f"{what} is not positive definite") from exc
    d = np.diag(c[0])
    _check_pivot(float(np.min(d) ** 2), float(np.max(np.abs(A))), what)
    inv = sla.cho_solve(c, np.eye(A.shape[0]), check_finite=False)
    return symmetrize(inv)


def _as_block(B, order: int, name: str) -> np.ndarray:
    if B is None:
        return np.empty((order, 0))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.ndim != 2 or B.shape[0] != order:
        raise DimensionMismatch(f"{name} has shape {B.shape}, expected ({order}, k)")
    return B


def rank1_update(S_inv: np.ndarray, v: np.ndarray, sign: int) -> np.ndarray:
    """
    Return (S + sign·v vᵀ)⁻¹ given S⁻¹, in O(J²).

    Raises SingularPivot when 1 + sign·vᵀS⁻¹v is (numerically) zero, which for
    a removal means the downdated matrix would lose positive definiteness.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    v = np.asarray(v, dtype=float)
    if v.shape != (S_inv.shape[0],):
        raise DimensionMismatch(f"vector of length {v.size} for order {S_inv.shape[0]}")
    w = S_inv @ v
    q = float(v @ w)
    denom = 1.0 + sign * q
    _check_pivot(denom, abs(q), "Sherman-Morrison denominator")
    return symmetrize(S_inv - (sign / denom) * np.outer(w, w))


def rankk_update(S_inv: np.ndarray, add=None, remove=None) -> np.ndarray:
    """
    Return (S + C Cᵀ − R Rᵀ)⁻¹ given S⁻¹, with C = ``add`` and R = ``remove``.

    Additions and removals are folded into a single Woodbury step: with
    H = [C | R] and H' = [C | −R]ᵀ the result is

        S⁻¹ − S⁻¹H (I + H'S⁻¹H)⁻¹ H'S⁻¹

    so the only factorization is of a (|C|+|R|)-square inner matrix.
    """
    J = S_inv.shape[0]
    C = _as_block(add, J, "add")
    R = _as_block(remove, J, "remove")
    k = C.shape[1] + R.shape[1]
    if k == 0:
        return S_inv.copy()
    H = np.hstack([C, R])
    signs = np.concatenate([np.ones(C.shape[1]), -np.ones(R.shape[1])])
    T = S_inv @ H                                   # S⁻¹H, J×k
    inner = np.eye(k) + signs[:, None] * (H.T @ T)  # I + H'S⁻¹H
    lu = _lu(inner, "Woodbury inner matrix")
    rhs = signs[:, None] * T.T                      # H'S⁻¹ (S⁻¹ symmetric)
    return symmetrize(S_inv - T @ sla.lu_solve(lu, rhs, check_finite=False))


def block_inverse_append(Q_inv: np.ndarray, eta: np.ndarray, corner: np.ndarray, Q_matmul=None) -> np.ndarray:
    """
    Inverse of the bordered matrix [[Q, η], [ηᵀ, Q_CC]] from Q⁻¹.

    With G = −Q⁻¹η and Z = Q_CC − ηᵀQ⁻¹η the result is

        [[Q⁻¹ + G Z⁻¹ Gᵀ, G Z⁻¹],
         [Z⁻¹ Gᵀ,         Z⁻¹  ]]

    The N×N block is never re-inverted; only Z (|C|×|C|) is.

    Z is a difference of two large, nearly equal terms whenever η lies close
    to the dominant eigenspace of Q, so errors already present in Q⁻¹ are
    amplified there. If ``Q_matmul`` (a callable returning Q @ B) is given,
    G receives one step of iterative refinement, G ← G − Q⁻¹(QG + η), which
    restores it to the accuracy of a fresh inverse.
    """
    N = Q_inv.shape[0]
    eta = _as_block(eta, N, "eta")
    c = eta.shape[1]
    corner = np.atleast_2d(np.asarray(corner, dtype=float))
    if c == 0 and corner.size == 0:
        return Q_inv.copy()
    if corner.shape != (c, c):
        raise DimensionMismatch(f"corner has shape {corner.shape}, expected ({c}, {c})")
    G = -(Q_inv @ eta)
    if Q_matmul is not None:
        G -= Q_inv @ (Q_matmul(G) + eta)
    Z = corner + eta.T @ G
    asym = float(np.max(np.abs(Z - Z.T)))
    zscale = float(np.max(np.abs(corner)))
    if asym > 1e-8 * (1.0 + zscale):
        raise SingularPivot(f"Schur complement Z is not symmetric (|Z - Zᵀ| = {asym:.3e})")
    Z = symmetrize(Z)
    if c == 1:
        _check_pivot(float(Z[0, 0]), zscale, "Schur complement Z")
        Z_inv = 1.0 / Z
    else:
        Z_inv = symmetrize(sla.lu_solve(_lu(Z, "Schur complement Z"), np.eye(c), check_finite=False))
    GZ = G @ Z_inv
    out = np.empty((N + c, N + c))
    out[:N, :N] = Q_inv + GZ @ G.T
    out[:N, N:] = GZ
    out[N:, :N] = GZ.T
    out[N:, N:] = Z_inv
    return symmetrize(out)


def block_inverse_remove(Q_inv: np.ndarray, indices) -> np.ndarray:
    """
    Inverse of Q with rows/columns ``indices`` (0-based) deleted, from Q⁻¹.

    Q⁻¹ is partitioned (virtually, by index sets) into the surviving block Θ,
    the cross block ξ_R and the removed block θ_R; the result is
    Θ − ξ_R θ_R⁻¹ ξ_Rᵀ. Survivors keep their relative order.
    """
    N = Q_inv.shape[0]
    idx = np.asarray(indices, dtype=np.intp).ravel()
    if idx.size == 0:
        return Q_inv.copy()
    if np.any(idx < 0) or np.any(idx >= N):
        raise IndexOutOfRange(f"removal indices must lie in [0, {N})")
    if np.unique(idx).size != idx.size:
        raise IndexOutOfRange("duplicate removal index")
    if idx.size >= N:
        raise IndexOutOfRange(f"cannot remove {idx.size} of {N} rows")
    keep = np.ones(N, dtype=bool)
    keep[idx] = False
    keep = np.flatnonzero(keep)
    Theta = Q_inv[np.ix_(keep, keep)]
    xi = Q_inv[np.ix_(keep, idx)]
    theta = Q_inv[np.ix_(idx, idx)]
    if idx.size == 1:
        _check_pivot(float(theta[0, 0]), 0.0, "removed diagonal block")
        Theta -= np.outer(xi[:, 0], xi[:, 0]) / theta[0, 0]
        return symmetrize(Theta)
    lu = _lu(theta, "removed diagonal block")
    Theta -= xi @ sla.lu_solve(lu, xi.T, check_finite=False)
    return symmetrize(Theta)
