"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--k 6 20 100]

Both backends are imported from the same module, so the comparison does not
depend on ``AUCTION_ELR_DISABLE_NUMBA``. The first numba call (compilation)
is excluded.
"""

import argparse
import timeit

import numpy as np

from auction_elr import _kernels as kern


def _start(k, r, seed):
    rng = np.random.default_rng(seed)
    d = rng.dirichlet(np.ones(k - 1)) * (1 - 1 / r)
    return d


def cases(k, r=4.0, n=3):
    total = 1 - 1 / r
    floor = 1e-12
    d = _start(k, r, 0)
    return {
        "gradient": (lambda: kern.gradient_np(d, n), lambda: kern.gradient_jit(d, n)),
        "ascend": (
            lambda: kern.ascend_np(d, n, total, floor, 2000, 1e-10),
            lambda: kern.ascend_jit(d, n, total, floor, 2000, 1e-10),
        ),
        "log_tail": (lambda: kern.log_tail_np(0.999, n, 20000), lambda: kern.log_tail_jit(0.999, n, 20000)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--k", type=int, nargs="+", default=[6, 20, 100])
    args = ap.parse_args(argv)
    if not kern.HAVE_NUMBA:
        print("numba not importable; only the numpy path exists")
        return 1
    print(f"{'kernel':<10}{'k':>6}{'numpy us':>14}{'numba us':>14}{'speedup':>10}")
    for k in args.k:
        for name, (np_fn, jit_fn) in cases(k).items():
            if name == "log_tail" and k != args.k[0]:
                continue  # independent of k
            jit_fn()  # compile
            number = 20 if name == "ascend" else 200
            t_np = min(timeit.repeat(np_fn, number=number, repeat=args.repeat)) / number * 1e6
            t_jit = min(timeit.repeat(jit_fn, number=number, repeat=args.repeat)) / number * 1e6
            print(f"{name:<10}{k:>6}{t_np:>14.1f}{t_jit:>14.1f}{t_np / t_jit:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
