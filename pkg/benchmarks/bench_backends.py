"""
Time the numba and numpy versions of the two hot kernels side by side.

    python benchmarks/bench_backends.py [--repeat 5] [--n 4000]

Each row reports the best-of-``repeat`` wall time per backend and the speedup
of numba over numpy. The first numba call (JIT compile or cache load) is done
before timing.
"""

import argparse
import timeit

import numpy as np

from inckrr import _accel
from inckrr.kernels import _monomial_table


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--n", type=int, default=4000, help="rows per call")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    cases = []
    for M, d in ((10, 2), (21, 2), (10, 3), (21, 3)):
        X = rng.normal(size=(args.n, M))
        tables = _monomial_table(M, d)
        cases.append((f"poly_features M={M} d={d} J={tables[0].size}",
                      lambda X=X, t=tables: _accel.poly_features_numba(X, *t),
                      lambda X=X, t=tables: _accel.poly_features_numpy(X, *t)))
    for m, M in ((4, 10), (64, 10), (args.n, 10), (64, 50)):
        X, Z = rng.normal(size=(args.n, M)), rng.normal(size=(m, M))
        cases.append((f"sq_distances {args.n}x{m} M={M}",
                      lambda X=X, Z=Z: _accel.sq_distances_numba(X, Z),
                      lambda X=X, Z=Z: _accel.sq_distances_numpy(X, Z)))

    print(f"{'kernel':<38} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, fast, slow in cases:
        fast()  # compile or load from cache
        t_nb, t_np = best(fast, args.repeat), best(slow, args.repeat)
        print(f"{name:<38} {t_nb:10.5f} {t_np:10.5f} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
