"""Compare the numba kernels with the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 3] [--n 9] [--edges 16]

Both backends are imported side by side, so FACTORFORGE_NO_NUMBA does not
matter here. Compile time of the numba kernels is reported separately.
"""

import argparse
import time

import numpy as np

from factorforge import _kernels
from factorforge.oracle import generate_planted_instance


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def host_with_edges(seed, n, edges):
    # try seeds until the planted host has enough edges, then truncate
    for s in range(seed, seed + 1000):
        inst = generate_planted_instance(s, n, "random-multi", 2)
        if inst.host.edge_count >= edges:
            h = inst.host
            return h.n, h.eu[:edges].copy(), h.ev[:edges].copy()
    raise RuntimeError("no host with enough edges")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=9, help="vertices for the partition search")
    ap.add_argument("--edges", type=int, default=16, help="edges for the subset kernels")
    args = ap.parse_args()

    fallback = _kernels.numpy_kernels
    t0 = time.perf_counter()
    jit = _kernels.loop_kernels()
    n, eu, ev = host_with_edges(1, 6, args.edges)
    # first call triggers compilation (or a cache load)
    _kernels.best_violating_partition(n, eu, ev, 2, jit)
    _kernels.feasible_masks(n, eu, ev, np.zeros(n), np.full(n, 99), 0, jit)
    _kernels.connected_mask_filter(n, eu, ev, np.arange(4), jit)
    print(f"numba compile/cache load: {time.perf_counter() - t0:.2f}s")

    pn, peu, pev = host_with_edges(2, args.n, 2 * args.n)
    lower = np.zeros(n, dtype=np.int64)
    upper = np.full(n, 4, dtype=np.int64)
    all_masks = np.arange(1 << args.edges, dtype=np.int64)

    cases = [
        (f"partition search n={pn} m=3", lambda k: _kernels.best_violating_partition(pn, peu, pev, 3, k)),
        (f"degree window |E|={args.edges}", lambda k: _kernels.feasible_masks(n, eu, ev, lower, upper, 0, k)),
        (f"connectivity filter |E|={args.edges}", lambda k: _kernels.connected_mask_filter(n, eu, ev, all_masks, k)),
    ]
    print(f"{'kernel':34s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, run in cases:
        t_np, out_np = best_of(lambda: run(fallback), args.repeat)
        t_nb, out_nb = best_of(lambda: run(jit), args.repeat)
        same = (out_np is None and out_nb is None) or np.array_equal(out_np, out_nb)
        flag = "" if same else "  MISMATCH"
        print(f"{name:34s} {t_np:9.4f}s {t_nb:9.4f}s {t_np / max(t_nb, 1e-9):7.1f}x{flag}")


if __name__ == "__main__":
    main()
