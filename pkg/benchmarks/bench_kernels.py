#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the wrap sweep and the component labeling on a mid-size window with
both backends, checks that the outputs agree bit for bit, and prints the
throughput ratio.  Usage: python benchmarks/bench_kernels.py [--extent N]
[--runs R].
"""

import argparse
import time

import numpy as np

from percolab import _kernels_py
from percolab.lattice import GraphView, LatticeSpec
from percolab.rng import substream_array

try:
    from percolab import _kernels as _compiled
except ImportError:
    _compiled = None


def time_call(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--extent", type=int, default=64)
    parser.add_argument("--runs", type=int, default=40)
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()

    view = GraphView.build("g", LatticeSpec(2, (4,)), args.extent, periodic=True)
    adj = view.adjacency()
    seeds = substream_array(args.seed, args.runs)
    insertions = args.runs * view.volume

    print(f"window {args.extent}x{args.extent} decorated lattice (k=4), {view.volume} sites, "
          f"{args.runs} wrap-sweep runs")
    header = f"{'kernel':<18}{'backend':<10}{'seconds':>10}{'Msites/s':>10}"
    print(header)
    print("-" * len(header))

    results = {}
    for name, mod in (("compiled", _compiled), ("python", _kernels_py)):
        if mod is None:
            print(f"{'wrap sweep':<18}{name:<10}{'missing':>10}")
            continue
        mstar = np.empty(args.runs, dtype=np.int32)
        dt = time_call(mod.nz_wrap_site, adj.indptr, adj.indices, adj.disp,
                       seeds, mstar)
        results[name] = (dt, mstar.copy())
        print(f"{'wrap sweep':<18}{name:<10}{dt:>10.3f}{insertions / dt / 1e6:>10.2f}")

    if len(results) == 2:
        same = np.array_equal(results["compiled"][1], results["python"][1])
        ratio = results["python"][0] / results["compiled"][0]
        print(f"wrap sweep: outputs identical={same}, speedup x{ratio:.0f}")

    open_mask = (np.arange(view.volume) % 7 != 0).astype(np.uint8)
    comp_results = {}
    for name, mod in (("compiled", _compiled), ("python", _kernels_py)):
        if mod is None:
            continue
        labels = np.empty(view.volume, dtype=np.int32)
        reps = 200 if name == "compiled" else 2
        t0 = time.perf_counter()
        for _ in range(reps):
            mod.components_site(adj.indptr, adj.indices, open_mask, labels)
        dt = (time.perf_counter() - t0) / reps
        comp_results[name] = (dt, labels.copy())
        print(f"{'components':<18}{name:<10}{dt:>10.5f}"
              f"{view.volume / dt / 1e6:>10.2f}")
    if len(comp_results) == 2:
        same = np.array_equal(comp_results["compiled"][1], comp_results["python"][1])
        ratio = comp_results["python"][0] / comp_results["compiled"][0]
        print(f"components: outputs identical={same}, speedup x{ratio:.0f}")


if __name__ == "__main__":
    main()
