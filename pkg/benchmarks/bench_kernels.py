"""Time the numba and numpy flavours of each hot kernel side by side.

    python3 benchmarks/bench_kernels.py [--n 1000 10000] [--repeat 5]

Both flavours are imported explicitly, so HMFLAB_NUMBA does not matter here.
The first numba call (compilation or cache load) is excluded from timing.
"""
import argparse
import time

import numpy as np

from hmflab import kernels
from hmflab._jit import HAVE_NUMBA


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_mean_field(n, repeat, rng):
    theta = rng.uniform(-np.pi, np.pi, n)
    force = np.empty(n)
    out = {}
    for name, fn in (("numba", kernels.mean_field_nb), ("numpy", kernels.mean_field_np)):
        fn(theta, force)
        out[name] = best_of(lambda: fn(theta, force), repeat)
    return out


def bench_advance(n, repeat, rng, nsteps=100):
    theta0 = rng.uniform(-np.pi, np.pi, n)
    p0 = rng.normal(0.0, 0.1, n)
    out = {}
    for name, fn, mf in (("numba", kernels.advance_nb, kernels.mean_field_nb),
                         ("numpy", kernels.advance_np, kernels.mean_field_np)):
        def run():
            theta, p, force = theta0.copy(), p0.copy(), np.empty(n)
            mf(theta, force)
            fn(theta, p, force, 0.05, nsteps, kernels.YOSHIDA4)
        run()
        out[name] = best_of(run, repeat)
    return out


def bench_jacobi(n, repeat, rng):
    x = rng.normal(size=(n, n))
    a0 = 0.5 * (x + x.T)
    out = {}
    for name, fn in (("numba", kernels.jacobi_nb), ("numpy", kernels.jacobi_np)):
        fn(a0.copy(), 1e-12, 50)
        out[name] = best_of(lambda: fn(a0.copy(), 1e-12, 50), repeat)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[1000, 10000], help="particle counts")
    ap.add_argument("--matrix", type=int, nargs="+", default=[32, 96], help="Jacobi matrix sizes")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        ap.exit(1, "numba is not installed; nothing to compare\n")
    rng = np.random.default_rng(0)

    rows = []
    for n in args.n:
        rows.append(("mean_field", n, bench_mean_field(n, args.repeat, rng)))
        rows.append(("advance x100", n, bench_advance(n, args.repeat, rng)))
    for n in args.matrix:
        rows.append(("jacobi", n, bench_jacobi(n, args.repeat, rng)))

    print(f"{'kernel':<14}{'size':>8}{'numba [ms]':>14}{'numpy [ms]':>14}{'speedup':>10}")
    for kernel, n, t in rows:
        print(f"{kernel:<14}{n:>8}{1e3 * t['numba']:>14.3f}{1e3 * t['numpy']:>14.3f}"
              f"{t['numpy'] / t['numba']:>10.1f}")


if __name__ == "__main__":
    main()
