"""Compiled kernels versus the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--grids 256,1024,4096]

Both backends run on the same sampled loops; results are checked for
agreement before timing.
"""

import argparse
import timeit

import numpy as np

from reidemeister import _fallback, models
from reidemeister.curve import TWO_PI

try:
    from reidemeister import _kernels
except ImportError:
    _kernels = None


def _samples(loop, m):
    u = np.arange(m) * TWO_PI / m
    return np.ascontiguousarray(loop.eval(u))


def _check(pts):
    x, y = np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])
    a = _fallback.segment_crossings(x, y, 3)
    b = _kernels.segment_crossings(x, y, 3)
    for p, q in zip(a, b):
        np.testing.assert_allclose(p, q, atol=1e-12)
    ra, rb = _fallback.min_pair_ratio(pts), _kernels.min_pair_ratio(pts)
    assert abs(ra[0] - rb[0]) < 1e-12 and ra[1:] == rb[1:]


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grids", default="256,1024,4096")
    args = ap.parse_args(argv)
    grids = [int(g) for g in args.grids.split(",")]
    loops = {"trefoil": models.trefoil(), "figure_eight": models.figure_eight_knot()}
    print(f"{'loop':<13}{'kernel':<19}{'M':>6}{'python ms':>12}{'compiled ms':>13}{'speedup':>9}")
    for name, loop in loops.items():
        for m in grids:
            pts = _samples(loop, m)
            x, y = np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])
            cases = {
                "segment_crossings": (lambda mod: mod.segment_crossings(x, y, 3)),
                "min_pair_ratio": (lambda mod: mod.min_pair_ratio(pts)),
            }
            if _kernels is not None:
                _check(pts)
            for kname, call in cases.items():
                if kname == "min_pair_ratio" and m > 1024:
                    continue  # O(M^2) dense; used at M <= 1024
                tp = _time(lambda: call(_fallback), args.repeat) * 1e3
                if _kernels is None:
                    print(f"{name:<13}{kname:<19}{m:>6}{tp:>12.2f}{'n/a':>13}{'':>9}")
                    continue
                tc = _time(lambda: call(_kernels), args.repeat) * 1e3
                print(f"{name:<13}{kname:<19}{m:>6}{tp:>12.2f}{tc:>13.2f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
