"""Time the compiled and pure-Python census kernels on the same inputs.

    python benchmarks/bench_kernels.py [--depths 10 12 14 16] [--repeat 3]
"""
import argparse
import time

import numpy as np

from levy_boundary import dragon
from levy_boundary._kernels import _pycensus

try:
    from levy_boundary._kernels import _ccensus
except ImportError:
    _ccensus = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", type=int, nargs="+", default=[10, 12, 14, 16])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"{'k':>3} {'leaves':>12} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for k in args.depths:
        occ = dragon.iterate(k)
        enc = occ.encoding
        call = (dragon.leaf_rows(enc, 0), k, occ.keys, enc.star_deltas(k), enc.stride, enc.bias)
        t_py, h_py = best_of(lambda: _pycensus.census_histogram(*call), args.repeat)
        if _ccensus is None:
            print(f"{k:>3} {15 * 2**k:>12} {t_py:>10.3f} {'n/a':>11} {'n/a':>8}")
            continue
        t_c, h_c = best_of(lambda: _ccensus.census_histogram(*call), args.repeat)
        assert np.array_equal(h_py, h_c), f"kernels disagree at k={k}"
        print(f"{k:>3} {15 * 2**k:>12} {t_py:>10.3f} {t_c:>11.3f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
