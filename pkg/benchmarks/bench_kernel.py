"""Compiled MPFR kernel vs the pure-Python (gmpy2) fallback.

Evaluates the CDF mixture of MRC outage distributions on an x grid with both
backends, checks the outputs are bit-identical and reports the speedup.

    python benchmarks/bench_kernel.py [--points N] [--repeat R]
"""

import argparse
import time

import numpy as np

from cgqf.kernels import BACKEND, MixtureKernel, PythonMixtureKernel
from cgqf.mrc import MrcScenario, channel_distribution

CASES = [
    ("P=2 k=[1,0.5] m=50", MrcScenario(k=[1, 0.5], rho=0.5, m=50)),
    ("P=4 k=[0.5,0.25,0.25,0] m=40", MrcScenario(k=[0.5, 0.25, 0.25, 0], rho=0.5, m=40)),
    ("P=4 k=[8,7,6,6] m=150", MrcScenario(k=[8, 7, 6, 6], rho=0.5, m=150)),
]


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if BACKEND != "compiled":
        raise SystemExit("compiled kernel not available; build with `pip install -e .`")

    print(f"{'case':34s} {'terms':>6s} {'compiled':>10s} {'python':>10s} {'speedup':>8s} identical")
    for name, sc in CASES:
        d = channel_distribution(sc)
        groups = [(b, w) for b, _, w in d.groups]
        x = np.linspace(0.0, 4.0 * d.mean(), args.points)
        fast = MixtureKernel(groups, d.precision_bits, 1.0)
        slow = PythonMixtureKernel(groups, d.precision_bits, 1.0)
        tc, (vc, _) = best_of(lambda: fast.evaluate(x), args.repeat)
        tp, (vp, _) = best_of(lambda: slow.evaluate(x), args.repeat)
        same = np.array_equal(vc, vp)
        print(f"{name:34s} {d.total_multiplicity:6d} {tc:9.3f}s {tp:9.3f}s {tp / tc:7.1f}x {same}")


if __name__ == "__main__":
    main()
