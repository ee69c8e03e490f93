import sys
import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spd(rng, order, cond=1e3):
    """SPD matrix with eigenvalues log-spaced in [1, cond] and a random eigenbasis."""
    Qm, _ = np.linalg.qr(rng.normal(size=(order, order)))
    lam = np.exp(rng.uniform(0.0, np.log(cond), size=order))
    lam[0], lam[-1] = 1.0, cond
    A = (Qm * lam) @ Qm.T
    return 0.5 * (A + A.T)


def precise_inverse(A):
    """
    Dense-inverse oracle: LAPACK inverse followed by two Newton steps whose
    residual I − A·X is formed in extended precision.
    """
    A = np.asarray(A, dtype=float)
    X = np.linalg.inv(A).astype(np.longdouble)
    Al = A.astype(np.longdouble)
    eye = np.eye(A.shape[0], dtype=np.longdouble)
    for _ in range(2):
        X = X + X @ (eye - Al @ X)
    X = X.astype(float)
    return 0.5 * (X + X.T)


def rel_err(A, B):
    return float(np.max(np.abs(np.asarray(A) - np.asarray(B))) / np.max(np.abs(B)))


class Stream:
    """A random +adds/−removes edit stream over a fixed pool of labelled samples."""

    def __init__(self, rng, n0, M, rounds, adds=4, removes=2, scale=1.0):
        from inckrr.edits import EditBatch

        total = n0 + rounds * adds
        self.X = scale * rng.normal(size=(total, M))
        w = rng.normal(size=M)
        self.y = np.sign(self.X @ w + 0.3 * rng.normal(size=total))
        self.y[self.y == 0] = 1.0
        self.ids0 = np.arange(n0)
        members = list(range(n0))
        nxt = n0
        self.batches = []
        for _ in range(rounds):
            add = np.arange(nxt, nxt + adds)
            nxt += adds
            rem = tuple(int(i) for i in rng.choice(members, size=removes, replace=False))
            members = [m for m in members if m not in rem] + [int(i) for i in add]
            self.batches.append(EditBatch(self.X[add], self.y[add], add, rem))
        self.final = np.array(members)

    @property
    def initial(self):
        return dict(X=self.X[self.ids0], y=self.y[self.ids0], ids=self.ids0)

    def data(self, ids):
        ids = np.asarray(ids)
        return dict(X=self.X[ids], y=self.y[ids], ids=ids)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.VERDICTS):
        terminalreporter.write_line(acc.VERDICTS[n])
