import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inckrr import linalg
from inckrr.errors import IndexOutOfRange, SingularPivot

from conftest import precise_inverse, random_spd, rel_err


# rank1_update

def test_rank1_add_unit_vector():
    out = linalg.rank1_update(np.eye(2), np.array([1.0, 0.0]), +1)
    np.testing.assert_array_equal(out, np.diag([0.5, 1.0]))


def test_rank1_remove_restores_identity():
    out = linalg.rank1_update(np.diag([0.5, 1.0]), np.array([1.0, 0.0]), -1)
    np.testing.assert_allclose(out, np.eye(2), rtol=0, atol=1e-15)


def test_rank1_remove_to_singular():
    with pytest.raises(SingularPivot):
        linalg.rank1_update(np.eye(2), np.array([1.0, 0.0]), -1)


def test_rank1_leaves_input_alone(rng):
    S_inv = precise_inverse(random_spd(rng, 5))
    before = S_inv.copy()
    linalg.rank1_update(S_inv, rng.normal(size=5), +1)
    np.testing.assert_array_equal(S_inv, before)


def test_rank1_bad_sign():
    with pytest.raises(ValueError):
        linalg.rank1_update(np.eye(2), np.ones(2), 0)


# rankk_update

def test_rankk_add_remove_cancel():
    e1 = np.array([[1.0], [0.0]])
    out = linalg.rankk_update(0.5 * np.eye(2), add=e1, remove=e1)
    np.testing.assert_allclose(out, 0.5 * np.eye(2), rtol=0, atol=1e-15)


def test_rankk_two_orthonormal_adds():
    C = np.eye(3)[:, :2]
    out = linalg.rankk_update(np.eye(3), add=C)
    np.testing.assert_allclose(out, np.diag([0.5, 0.5, 1.0]), rtol=0, atol=1e-15)


def test_rankk_random_3x3(rng):
    S = random_spd(rng, 3, cond=10.0)
    C = rng.normal(size=(3, 2))
    R = 0.3 * rng.normal(size=(3, 1))
    out = linalg.rankk_update(precise_inverse(S), add=C, remove=R)
    assert rel_err(out, precise_inverse(S + C @ C.T - R @ R.T)) <= 1e-10


def test_rankk_empty_is_copy(rng):
    S_inv = precise_inverse(random_spd(rng, 4))
    out = linalg.rankk_update(S_inv)
    np.testing.assert_array_equal(out, S_inv)
    assert out is not S_inv


def test_rankk_singular_inner():
    e1 = np.array([[1.0], [0.0]])
    with pytest.raises(SingularPivot):
        linalg.rankk_update(np.eye(2), remove=e1)


def test_rankk_wrong_rows():
    with pytest.raises(Exception):
        linalg.rankk_update(np.eye(3), add=np.ones((2, 1)))


# block_inverse_append

def test_append_block_diagonal():
    out = linalg.block_inverse_append(np.array([[1.0]]), np.array([[0.0]]), np.array([[2.0]]))
    np.testing.assert_array_equal(out, np.diag([1.0, 0.5]))


def test_append_bordered_3x3():
    Q = np.array([[2.0, 1.0], [1.0, 2.0]])
    eta = np.array([[1.0], [1.0]])
    out = linalg.block_inverse_append(np.linalg.inv(Q), eta, np.array([[2.0]]))
    B = np.block([[Q, eta], [eta.T, np.array([[2.0]])]])
    assert rel_err(out, precise_inverse(B)) <= 1e-12


def test_append_zero_schur():
    Q = np.array([[2.0, 1.0], [1.0, 2.0]])
    Q_inv = np.array([[2.0, -1.0], [-1.0, 2.0]]) / 3.0
    eta = np.array([[1.0], [0.0]])
    corner = eta.T @ Q_inv @ eta
    with pytest.raises(SingularPivot):
        linalg.block_inverse_append(Q_inv, eta, corner)
    # the same holds with refinement
    with pytest.raises(SingularPivot):
        linalg.block_inverse_append(Q_inv, eta, corner, Q_matmul=lambda G: Q @ G)


def test_append_block_singular_corner():
    # two identical new samples make Z rank deficient
    Q_inv = np.eye(2)
    eta = np.array([[1.0, 1.0], [0.0, 0.0]])
    corner = np.array([[2.0, 2.0], [2.0, 2.0]])
    with pytest.raises(SingularPivot):
        linalg.block_inverse_append(Q_inv, eta, corner)


def test_append_asymmetric_corner():
    with pytest.raises(SingularPivot):
        linalg.block_inverse_append(np.eye(1), np.zeros((1, 2)), np.array([[2.0, 1.0], [0.0, 2.0]]))


# block_inverse_remove (positions are 0-based)

def test_remove_trailing():
    out = linalg.block_inverse_remove(np.diag([1.0, 0.5]), [1])
    np.testing.assert_array_equal(out, [[1.0]])


def test_remove_leading():
    out = linalg.block_inverse_remove(np.diag([0.5, 1 / 3]), [0])
    np.testing.assert_allclose(out, [[1 / 3]], rtol=1e-15)


def test_remove_two_of_four(rng):
    Q = random_spd(rng, 4, cond=50.0)
    out = linalg.block_inverse_remove(precise_inverse(Q), [0, 2])
    keep = [1, 3]
    assert rel_err(out, precise_inverse(Q[np.ix_(keep, keep)])) <= 1e-10


def test_remove_keeps_relative_order(rng):
    Q = random_spd(rng, 6, cond=20.0)
    out = linalg.block_inverse_remove(precise_inverse(Q), [4, 1])
    keep = [0, 2, 3, 5]
    assert rel_err(out, precise_inverse(Q[np.ix_(keep, keep)])) <= 1e-10


def test_remove_singular_theta():
    with pytest.raises(SingularPivot):
        linalg.block_inverse_remove(np.array([[0.0, 1.0], [1.0, 0.0]]), [0])
    with pytest.raises(SingularPivot):
        linalg.block_inverse_remove(np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]), [0, 1])


@pytest.mark.parametrize("indices", [[2], [-1], [0, 0], [0, 1]])
def test_remove_bad_indices(indices):
    with pytest.raises(IndexOutOfRange):
        linalg.block_inverse_remove(np.eye(2), indices)


def test_spd_inverse_rejects_indefinite():
    with pytest.raises(SingularPivot):
        linalg.spd_inverse(np.array([[1.0, 2.0], [2.0, 1.0]]))


# properties

spd_case = st.tuples(st.integers(0, 2**32 - 1), st.integers(1, 50), st.floats(0.0, 6.0))


def _case(seed, order, log_cond):
    rng = np.random.default_rng(seed)
    S = random_spd(rng, order, 10.0**log_cond)
    return rng, S, precise_inverse(S)


def _shrinkable(rng, S, k):
    # columns small enough that S − RRᵀ stays positive definite
    R = rng.normal(size=(S.shape[0], k))
    if k:
        R *= 0.7 * np.sqrt(np.linalg.eigvalsh(S)[0]) / np.linalg.norm(R, 2)
    return R


@settings(max_examples=60, deadline=None)
@given(spd_case, st.integers(1, 5))
def test_rankk_round_trip(case, k):
    rng, S, S_inv = _case(*case)
    V = rng.normal(size=(S.shape[0], k))
    there = linalg.rankk_update(S_inv, add=V)
    back = linalg.rankk_update(there, remove=V)
    assert np.linalg.norm(back - S_inv) <= 1e-10 * np.linalg.norm(S_inv)


@settings(max_examples=60, deadline=None)
@given(spd_case, st.integers(0, 4), st.integers(0, 4))
def test_rankk_matches_dense(case, c, r):
    rng, S, S_inv = _case(*case)
    C = rng.normal(size=(S.shape[0], c))
    R = _shrinkable(rng, S, r)
    out = linalg.rankk_update(S_inv, add=C, remove=R)
    assert rel_err(out, precise_inverse(S + C @ C.T - R @ R.T)) <= 1e-10
    np.testing.assert_array_equal(out, out.T)


@settings(max_examples=60, deadline=None)
@given(spd_case)
def test_rank1_matches_dense(case):
    rng, S, S_inv = _case(*case)
    v = rng.normal(size=S.shape[0])
    out = linalg.rank1_update(S_inv, v, +1)
    assert rel_err(out, precise_inverse(S + np.outer(v, v))) <= 1e-10
    w = _shrinkable(rng, S, 1)[:, 0]
    out = linalg.rank1_update(S_inv, w, -1)
    assert rel_err(out, precise_inverse(S - np.outer(w, w))) <= 1e-10
    np.testing.assert_array_equal(out, out.T)


@settings(max_examples=60, deadline=None)
@given(spd_case, st.integers(1, 4))
def test_append_remove_consistency(case, k):
    rng, _, _ = _case(*case)
    order = case[1]
    B = random_spd(rng, order + k, 10.0 ** case[2])
    Q = B[:order, :order]
    Q_inv = precise_inverse(Q)
    eta, corner = B[:order, order:], B[order:, order:]
    grown = linalg.block_inverse_append(Q_inv, eta, corner, Q_matmul=lambda G: Q @ G)
    assert rel_err(grown, precise_inverse(B)) <= 1e-10
    np.testing.assert_array_equal(grown, grown.T)
    back = linalg.block_inverse_remove(grown, list(range(order, order + k)))
    assert rel_err(back, Q_inv) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(spd_case, st.data())
def test_remove_matches_dense(case, data):
    rng, Q, Q_inv = _case(*case)
    order = Q.shape[0]
    if order < 2:
        return
    k = data.draw(st.integers(1, min(4, order - 1)))
    idx = rng.choice(order, size=k, replace=False)
    keep = np.setdiff1d(np.arange(order), idx)
    out = linalg.block_inverse_remove(Q_inv, idx)
    assert rel_err(out, precise_inverse(Q[np.ix_(keep, keep)])) <= 1e-10
    np.testing.assert_array_equal(out, out.T)
