import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inckrr import kbr
from inckrr.edits import EditBatch, relative_deviation
from inckrr.errors import DimensionMismatch, UnsupportedKernel
from inckrr.kernels import KernelSpec, feature_map

from conftest import Stream, precise_inverse

POLY2 = KernelSpec.poly(2)
SMALL_PRIOR = kbr.BayesPrior(0.01, 0.01)


def ridge_oracle(X, y, spec, rho):
    F = feature_map(spec, X)
    return np.linalg.solve(F.T @ F + rho * np.eye(F.shape[1]), F.T @ y)


def check_precision(post):
    J = post.dim
    P = np.eye(J) / post.prior.sigma_u2 + post.gram / post.prior.sigma_b2
    inv = precise_inverse(post.Sigma_post)
    assert np.max(np.abs(inv - P)) <= 1e-9 * np.max(np.abs(P))


def test_empty_posterior_is_prior():
    prior = kbr.BayesPrior(2.0, 0.3, mu_u=np.arange(6.0))
    post = kbr.fit_posterior(np.empty((0, 2)), [], prior, POLY2)
    np.testing.assert_allclose(post.mu_post, np.arange(6.0), rtol=1e-15)
    np.testing.assert_allclose(post.Sigma_post, 2.0 * np.eye(6), rtol=1e-15)
    assert post.n == 0


def test_krr_consistency(rng):
    X, y = rng.normal(size=(30, 3)), rng.normal(size=30)
    post = kbr.fit_posterior(X, y, SMALL_PRIOR, POLY2)
    assert relative_deviation(post.mu_post, ridge_oracle(X, y, POLY2, 1.0)) <= 1e-8


def test_one_sample():
    post = kbr.fit_posterior(np.zeros((1, 1)), [1.0], kbr.BayesPrior(1.0, 1.0), KernelSpec.poly(1))
    np.testing.assert_allclose(post.Sigma_post, np.diag([0.5, 1.0]), rtol=1e-15)
    np.testing.assert_allclose(post.mu_post, [0.5, 0.0], atol=1e-16)


def test_prior_validation():
    for bad in ((0.0, 1.0), (1.0, -1.0)):
        with pytest.raises(ValueError):
            kbr.BayesPrior(*bad)
    with pytest.raises(ValueError):
        kbr.BayesPrior(1.0, 1.0, mu_b=0.5)


def test_rbf_rejected(rng):
    with pytest.raises(UnsupportedKernel):
        kbr.fit_posterior(rng.normal(size=(3, 2)), np.ones(3), SMALL_PRIOR, KernelSpec.rbf())


def test_identity_edit(rng):
    post = kbr.fit_posterior(rng.normal(size=(5, 2)), rng.normal(size=5), SMALL_PRIOR, POLY2)
    assert kbr.update_posterior(post, EditBatch()) is post


def test_round_trip(rng):
    post = kbr.fit_posterior(rng.normal(size=(40, 3)), rng.normal(size=40), SMALL_PRIOR, POLY2)
    batch = EditBatch(rng.normal(size=(3, 3)), rng.normal(size=3), [70, 71, 72])
    back = kbr.update_posterior(kbr.update_posterior(post, batch), EditBatch(remove_ids=(70, 71, 72)))
    assert relative_deviation(back.mu_post, post.mu_post) <= 1e-9
    assert relative_deviation(back.Sigma_post, post.Sigma_post) <= 1e-9


def test_ten_rounds_match_refit(rng):
    st_ = Stream(rng, 150, 3, rounds=10)
    post = kbr.fit_posterior(prior=SMALL_PRIOR, spec=POLY2, **st_.initial)
    for batch in st_.batches:
        post = kbr.update_posterior(post, batch)
        check_precision(post)
    ref = kbr.fit_posterior(prior=SMALL_PRIOR, spec=POLY2, **st_.data(st_.final))
    assert relative_deviation(post.mu_post, ref.mu_post) <= 1e-8
    assert relative_deviation(post.Sigma_post, ref.Sigma_post) <= 1e-8


def test_grow_from_empty(rng):
    X, y = rng.normal(size=(6, 2)), rng.normal(size=6)
    post = kbr.fit_posterior(np.empty((0, 2)), [], SMALL_PRIOR, POLY2)
    post = kbr.update_posterior(post, EditBatch(X, y))
    ref = kbr.fit_posterior(X, y, SMALL_PRIOR, POLY2)
    assert relative_deviation(post.mu_post, ref.mu_post) <= 1e-9


def test_remove_everything(rng):
    post = kbr.fit_posterior(rng.normal(size=(3, 2)), rng.normal(size=3), SMALL_PRIOR, POLY2)
    empty = kbr.update_posterior(post, EditBatch(remove_ids=(0, 1, 2)))
    assert empty.n == 0
    assert relative_deviation(empty.Sigma_post, 0.01 * np.eye(6)) <= 1e-9


def test_prior_predictive(rng):
    prior = kbr.BayesPrior(0.7, 0.2)
    post = kbr.fit_posterior(np.empty((0, 3)), [], prior, POLY2)
    x = rng.normal(size=3)
    d = kbr.predict_distribution(post, x)
    phi = feature_map(POLY2, x)
    assert d.mean == 0.0
    assert d.variance == pytest.approx(0.2 + 0.7 * phi @ phi, rel=1e-14)
    assert d.std == pytest.approx(np.sqrt(d.variance))


def test_predictive_batch(rng):
    post = kbr.fit_posterior(rng.normal(size=(20, 2)), rng.normal(size=20), SMALL_PRIOR, POLY2)
    Xq = rng.normal(size=(5, 2))
    d = kbr.predict_distribution(post, Xq)
    F = feature_map(POLY2, Xq)
    np.testing.assert_allclose(d.mean, F @ post.mu_post, rtol=1e-14)
    np.testing.assert_allclose(d.variance, 0.01 + np.einsum("ij,jk,ik->i", F, post.Sigma_post, F), rtol=1e-12)
    np.testing.assert_array_equal(kbr.predict(post, Xq), d.mean)
    with pytest.raises(DimensionMismatch):
        kbr.predict_distribution(post, np.ones(3))


def test_increment_shrinks_variance(rng):
    st_ = Stream(rng, 50, 2, rounds=5, removes=0)
    post = kbr.fit_posterior(prior=SMALL_PRIOR, spec=POLY2, **st_.initial)
    Xq = rng.normal(size=(10, 2))
    var = kbr.predict_distribution(post, Xq).variance
    for batch in st_.batches:
        post = kbr.update_posterior(post, batch)
        new = kbr.predict_distribution(post, Xq).variance
        assert np.all(new <= var)
        ref = kbr.fit_posterior(prior=SMALL_PRIOR, spec=POLY2, **st_.data(post.ids))
        np.testing.assert_allclose(new, kbr.predict_distribution(ref, Xq).variance, rtol=1e-8)
        var = new


def test_with_prior(rng):
    X, y = rng.normal(size=(15, 2)), rng.normal(size=15)
    post = kbr.fit_posterior(X, y, SMALL_PRIOR, POLY2)
    other = kbr.BayesPrior(0.5, 0.1)
    swapped = kbr.with_prior(post, other)
    ref = kbr.fit_posterior(X, y, other, POLY2)
    np.testing.assert_allclose(swapped.mu_post, ref.mu_post, rtol=1e-12)


def test_order_independence(rng):
    st_ = Stream(rng, 40, 3, rounds=1)
    post = kbr.fit_posterior(prior=SMALL_PRIOR, spec=POLY2, **st_.initial)
    b = st_.batches[0]
    flipped = EditBatch(b.add_X[::-1], b.add_y[::-1], b.add_ids[::-1], b.remove_ids[::-1])
    one = kbr.update_posterior(post, b).mu_post
    two = kbr.update_posterior(post, flipped).mu_post
    assert relative_deviation(one, two) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(0, 40),
    M=st.integers(1, 4),
    d=st.integers(1, 3),
    su=st.floats(1e-2, 10.0),
    sb=st.floats(1e-2, 10.0),
)
def test_variance_floor_and_precision(seed, n, M, d, su, sb):
    rng = np.random.default_rng(seed)
    spec = KernelSpec.poly(d)
    prior = kbr.BayesPrior(su, sb)
    post = kbr.fit_posterior(rng.normal(size=(n, M)), rng.normal(size=n), prior, spec, dim=M)
    check_precision(post)
    var = kbr.predict_distribution(post, rng.normal(size=(8, M))).variance
    assert np.all(var >= sb)
