"""Compiled kernels against the pure-Python fallback.

Times the two predicates on random and near-degenerate inputs, and the
Delaunay core on uniform point sets, then checks that both backends give
identical answers. Usage::

    python3 benchmarks/bench_kernels.py [--sizes 1000,10000,50000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from dtdensity import _pykernels

try:
    from dtdensity import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_predicates(n, repeat):
    rng = np.random.default_rng(0)
    rand = rng.random((n, 8)).tolist()
    # collinear and cocircular inputs force the exact stage
    t = rng.uniform(-2, 2, size=(n, 3))
    lines = np.stack([t, 0.5 * t + 0.25], axis=2).reshape(n, 6).tolist()
    th = rng.uniform(0, 2 * np.pi, size=(n, 4))
    circ = np.stack([np.cos(th), np.sin(th)], axis=2).reshape(n, 8).tolist()
    rows = []
    for label, data, arity in (("orient2d random", rand, 6), ("orient2d collinear", lines, 6),
                               ("incircle random", rand, 8), ("incircle cocircular", circ, 8)):
        name = label.split()[0]
        out = []
        for mod in (_pykernels, _ckernels):
            if mod is None:
                out.append(None)
                continue
            f = getattr(mod, name)
            if name == "orient2d":
                out.append(_best(lambda: [f(*r[:arity]) for r in data], repeat))
            else:
                out.append(_best(lambda: [f(*r) for r in data], repeat))
        rows.append((f"{label} x{n}", *out))
    return rows


def bench_delaunay(sizes, repeat):
    rows = []
    for n in sizes:
        xy = np.random.default_rng(n).random((n, 2))
        xs, ys = xy[:, 0].tolist(), xy[:, 1].tolist()
        order = np.random.default_rng(1).permutation(n).tolist()
        times = []
        results = []
        for mod in (_pykernels, _ckernels):
            if mod is None:
                times.append(None)
                continue
            times.append(_best(lambda: mod.delaunay_core(xs, ys, order), repeat))
            results.append(mod.delaunay_core(xs, ys, order))
        if len(results) == 2 and results[0] != results[1]:
            raise SystemExit(f"backends disagree on delaunay_core for n={n}")
        rows.append((f"delaunay_core n={n}", *times))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,10000,50000")
    ap.add_argument("--predicates", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = bench_predicates(args.predicates, args.repeat) + bench_delaunay(sizes, args.repeat)
    print(f"{'case':34s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, py, cy in rows:
        speed = f"{py / cy:7.1f}x" if cy else "     n/a"
        cy_s = f"{cy:11.4f}" if cy is not None else f"{'n/a':>11s}"
        print(f"{name:34s} {py:11.4f} {cy_s} {speed}")


if __name__ == "__main__":
    main()
