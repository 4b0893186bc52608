#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the plain-python fallback.

The plain path is what runs when numba is missing or CCBOUND_NO_JIT=1 is
set; this script times both implementations side by side in one process.

Run:
    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from ccbound import _jit, kernels
from ccbound.attack import cc_chsh, tripartite
from ccbound.correlations import chsh_protocol_correlation
from ccbound.localset import vertex_matrix


def timeit(fn, args, repeat):
    fn(*args)  # warm-up (triggers JIT compilation on the compiled path)
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def bench_simplex(repeat):
    corr = chsh_protocol_correlation(math.pi / 4, 0.72)
    A = np.asarray(vertex_matrix(corr.scenario))
    b = corr.table.ravel().copy()
    c = np.ones(A.shape[1])
    args = (A, b, c, 1e-11, 20000)
    return ("local-membership simplex (24x56 tableau)",
            timeit(kernels.py_simplex_maximize, args, repeat),
            timeit(kernels.simplex_maximize, args, repeat))


def bench_cmi_after_map(repeat):
    joint = tripartite(cc_chsh(math.pi / 4, 0.72), 0, 2)
    rng = np.random.default_rng(0)
    rows = rng.dirichlet(np.ones(5), size=5)
    args = (np.ascontiguousarray(joint.p), rows)
    return ("conditional information after relabelling (2x2x5)",
            timeit(kernels.py_cmi_after_map_bits, args, repeat),
            timeit(kernels.cmi_after_map_bits, args, repeat))


def bench_sweep(repeat):
    joint = tripartite(cc_chsh(math.pi / 4, 0.72), 0, 2)
    args = (np.ascontiguousarray(joint.p), 5)
    return ("deterministic relabelling sweep (5^5 maps)",
            timeit(kernels.py_sweep_deterministic_maps, args, repeat),
            timeit(kernels.sweep_deterministic_maps, args, repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    print(f"numba available: {_jit.HAVE_NUMBA}    JIT enabled: {_jit.JIT_ENABLED}")
    if not _jit.JIT_ENABLED:
        print("note: JIT disabled; both columns time the same plain-python code\n")

    rows = [
        bench_simplex(args.repeat),
        bench_cmi_after_map(args.repeat * 10),
        bench_sweep(max(args.repeat // 10, 5)),
    ]
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>12}  {'jitted':>12}  {'speedup':>8}")
    for name, plain, jitted in rows:
        speedup = plain / jitted if jitted > 0 else float("inf")
        print(f"{name:<{width}}  {plain * 1e6:>10.1f}us  {jitted * 1e6:>10.1f}us  {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
