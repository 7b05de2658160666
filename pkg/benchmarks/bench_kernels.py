"""Time each kernel on every importable backend and check they agree.

    python benchmarks/bench_kernels.py [--rects N] [--rows N] [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from pgrdrc import kernels


def _rects(rng, n, die):
    w = rng.integers(100, 4000, n)
    h = rng.integers(100, 4000, n)
    x0 = rng.integers(0, die - 4000, n)
    y0 = rng.integers(0, die - 4000, n)
    return np.c_[x0, y0, x0 + w, y0 + h].astype(np.int64)


def cases(args):
    rng = np.random.default_rng(args.seed)
    die = 1_000_000
    xs = np.linspace(0, die, args.grid + 1).astype(np.int64)
    rects = _rects(rng, args.rects, die)
    d = 10
    z = rng.normal(size=(args.rows, d))
    mu, s2 = rng.normal(size=d), rng.uniform(0.5, 2.0, d)
    pos = np.sort(rng.normal(-30, 5, args.rows // 100))
    neg = np.sort(rng.normal(-14, 2, args.rows))
    thr = np.unique(np.r_[pos, neg])
    return {
        f"bin_rects ({args.rects:,} rects, {args.grid}x{args.grid})": ("bin_rects", (rects, xs, xs, True)),
        f"gaussian_log_density ({args.rows:,} x {d})": ("gaussian_log_density", (z, mu, s2)),
        f"sweep_counts ({thr.size:,} thresholds)": ("sweep_counts", (pos, neg, thr)),
    }


def _same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.allclose(x, y, rtol=1e-13, atol=0) for x, y in zip(a, b))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rects", type=int, default=200_000)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--rows", type=int, default=1_000_000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    names = sorted(kernels.BACKENDS)
    if "cython" not in names:
        print("compiled backend not built; timing the fallback only")
    print(f"{'kernel':<48s}" + "".join(f"{n:>12s}" for n in names) + ("   speedup" if len(names) > 1 else ""))
    for label, (fn, fargs) in cases(args).items():
        times, results = {}, {}
        for n in names:
            impl = getattr(kernels.BACKENDS[n], fn)
            results[n] = impl(*fargs)
            times[n] = min(timeit.repeat(lambda: impl(*fargs), number=1, repeat=args.repeat))
        row = f"{label:<48s}" + "".join(f"{times[n]:>11.4f}s" for n in names)
        if len(names) > 1:
            row += f"{times['pure'] / times['cython']:>9.1f}x"
            if not _same(results["pure"], results["cython"]):
                row += "  MISMATCH"
        print(row)


if __name__ == "__main__":
    main()
