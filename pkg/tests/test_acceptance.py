"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 6-8 run Monte Carlo at full desk scale and need the compiled kernel
backend to meet their wall-clock budgets (build with
``pip install -e . --no-build-isolation``).
"""

import time
from collections import deque

import numpy as np
import pytest

from percolab.engine import (
    MicrocanonicalCurve,
    WrapEvent,
    binomial_window,
    check_coupling,
    clusters,
    convolve,
    estimate_pc,
    sample_configuration,
)
from percolab.experiments import StudyPlan, run_study
from percolab.lattice import DECORATED, PRUNED, GraphView, LatticeSpec
from percolab.maps import check_isomorphism, check_quotient

PARAM_SETS = [
    LatticeSpec(d, k)
    for d in (1, 2)
    for k in ((2,), (3,), (5,), (2, 3), (3, 2), (2, 2, 2))
]


def report(num, name, ok, detail=""):
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
    assert ok, f"criterion {num} failed: {name} {detail}"


def test_criterion_01_isomorphism_suite():
    t0 = time.monotonic()
    for spec in PARAM_SETS:
        rep = check_isomorphism(spec, 3 * spec.period)
        assert rep.passed, rep.text()
    elapsed = time.monotonic() - t0
    report(1, "isomorphism suite (12 parameter sets, 3 periods/axis)",
           elapsed < 30.0, f"elapsed={elapsed:.1f}s")


def test_criterion_02_quotient_suite():
    t0 = time.monotonic()
    for spec in PARAM_SETS:
        rep = check_quotient(spec, extent=3, samples=100_000, seed=2024)
        assert rep.passed, rep.text()
    elapsed = time.monotonic() - t0
    report(2, "quotient suite (10^5 samples per set, window preimages)",
           elapsed < 30.0, f"elapsed={elapsed:.1f}s")


def test_criterion_03_coupling_suite():
    t0 = time.monotonic()
    for spec in PARAM_SETS:
        rep = check_coupling(spec, 3 * spec.period, n_configs=10_000, seed=99)
        assert rep.passed, rep.text()
    elapsed = time.monotonic() - t0
    report(3, "coupling suite (10^4 configurations per set, exact)",
           True, f"elapsed={elapsed:.1f}s")


def _bfs_partition(view, open_bits):
    seen = set()
    for i in range(view.volume):
        if not open_bits[i] or i in seen:
            continue
        comp, queue = [], deque([i])
        seen.add(i)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for u in view.neighbors(view.index_vertex(x)):
                ui = view.vertex_index(u)
                if open_bits[ui] and ui not in seen:
                    seen.add(ui)
                    queue.append(ui)
        yield frozenset(comp)


def test_criterion_04_engine_oracle():
    specs = [
        LatticeSpec(1, (2,)), LatticeSpec(1, (3,)), LatticeSpec(1, (2, 3)),
        LatticeSpec(2, (2,)), LatticeSpec(2, (3,)), LatticeSpec(2, ()),
    ]
    families = ("g", "f", "slab", "slab-tilde", "zd")
    rng = np.random.default_rng(41)
    t0 = time.monotonic()
    checked = 0
    for trial in range(1000):
        spec = specs[int(rng.integers(len(specs)))]
        family = families[trial % len(families)]
        periodic = bool(rng.integers(2))
        if family in (DECORATED, PRUNED):
            extent = spec.period * int(rng.integers(2, 5 if spec.d == 2 else 8))
        else:
            ndim = spec.d * (spec.n + 1)
            hi = max(3, int(round(2000 ** (1.0 / ndim))))
            extent = int(rng.integers(3, hi + 1))
        if trial % 100 == 0:
            spec, family, extent, periodic = LatticeSpec(2, ()), "zd", 100, True
        view = GraphView.build(family, spec, extent, periodic=periodic)
        assert view.volume <= 10_000
        cfg = sample_configuration(view, float(rng.uniform(0.2, 0.8)), trial)
        state = clusters(cfg, view)
        groups = {}
        for i, root in enumerate(state.parent):
            if cfg.open[i]:
                groups.setdefault(int(root), []).append(i)
        got = {frozenset(v) for v in groups.values()}
        want = set(_bfs_partition(view, cfg.open))
        assert got == want, (family, spec, extent, periodic, trial)
        checked += 1
    elapsed = time.monotonic() - t0
    report(4, "union-find equals breadth-first components (10^3 instances)",
           elapsed < 10.0, f"elapsed={elapsed:.1f}s instances={checked}")


def test_criterion_05_convolution_analytics():
    grid = np.linspace(0.0, 1.0, 101)

    def micro_of(mstar, M, runs):
        return MicrocanonicalCurve(
            mstar=np.asarray(mstar, dtype=np.int32), M=M, runs=runs, event="e",
            mode="site", family="zd", d=2, k_label="", size=1, seed=0)

    err_pow = np.abs(convolve(micro_of([2], 2, 1), grid).Q - grid**2).max()
    err_lin = np.abs(convolve(micro_of([1], 1, 1), grid).Q - grid).max()
    err_const = np.abs(convolve(micro_of([0, 6], 5, 2), grid).Q - 0.5).max()
    M = 2048
    err_big = np.abs(
        convolve(micro_of([1], M, 1), grid).Q - (1.0 - (1.0 - grid) ** M)
    ).max()
    worst_norm = 0.0
    for M2 in (10, 100, 5000):
        for p in (0.001, 0.1, 0.5, 0.937):
            _, weights, truncated = binomial_window(M2, p)
            worst_norm = max(worst_norm, abs(weights.sum() - 1.0), truncated)
    ok = max(err_pow, err_lin, err_const, err_big) < 1e-12 and worst_norm < 1e-12
    report(5, "convolution analytic cases and weight normalization",
           ok, f"max_err={max(err_pow, err_lin, err_const, err_big):.2e} "
               f"norm_err={worst_norm:.2e}")


def test_criterion_06_square_lattice_threshold():
    t0 = time.monotonic()
    spec = LatticeSpec(2, ())
    small = GraphView.build("zd", spec, 64, periodic=True)
    large = GraphView.build("zd", spec, 128, periodic=True)
    est = estimate_pc(small, large, WrapEvent(), runs=20_000, seed=12345)
    elapsed = time.monotonic() - t0
    ok = est.crossed and 0.585 <= est.p_hat <= 0.600 and elapsed < 300.0
    report(6, "square-lattice site threshold (wrap crossing 64 vs 128)",
           ok, f"pc={est.p_hat:.6f} CI=[{est.ci_low:.6f},{est.ci_high:.6f}] "
               f"elapsed={elapsed:.1f}s")


def test_criterion_07_sandwich_study():
    t0 = time.monotonic()
    plan = StudyPlan(kind="sandwich", d=2, k=(4,), out_dir="unused")
    rep = run_study(plan)
    elapsed = time.monotonic() - t0
    verdicts = {v.label: v.verdict for v in rep.verdicts}
    ok = (
        elapsed < 600.0
        and verdicts["pc(zd) <= pc(g)"] != "inverted"
        and verdicts["pc(g) <= pc(slab)"] != "inverted"
    )
    detail = " ".join(f"{k}:{v}" for k, v in verdicts.items())
    pcs = {lbl.split("@")[0]: est.p_hat for lbl, est in rep.thresholds.items()}
    report(7, "threshold sandwich for d=2, k=4",
           ok, f"{detail} pc={pcs} elapsed={elapsed:.1f}s")


def test_criterion_08_limit_trend_study():
    t0 = time.monotonic()
    plan = StudyPlan(kind="limit-trend", d=2, k_ladder=(2, 3, 5, 8), out_dir="unused")
    rep = run_study(plan)
    elapsed = time.monotonic() - t0
    adjacent = [v for v in rep.verdicts if v.label.startswith("pc(k=")]
    gap = [v for v in rep.verdicts if v.label.startswith("gap")]
    ok = (
        len(adjacent) == 3
        and all(v.verdict != "inverted" for v in adjacent)
        and len(gap) == 1
        and gap[0].verdict == "ordered"
    )
    detail = "; ".join(f"{v.label}:{v.verdict}" for v in rep.verdicts)
    report(8, "limit trend: nonincreasing ladder with shrinking gap",
           ok, f"{detail} elapsed={elapsed:.1f}s")


def test_criterion_09_conjecture_probe(tmp_path):
    plan = StudyPlan(kind="conjecture", d=2, k=(3,), window=96, radius=24,
                     p_grid=(0.15, 0.55, 0.02), runs=10_000, seed=12345,
                     out_dir=str(tmp_path / "a"))
    t0 = time.monotonic()
    rep_a = run_study(plan)
    rep_a.write()
    rep_b = run_study(plan)
    rep_b.write(str(tmp_path / "b"))
    elapsed = time.monotonic() - t0
    rows = [r.split(",") for r in rep_a.points]
    complete = (
        len(rows) >= 20
        and all(len(r) == 10 and r[-1] in
                ("ordered", "inverted", "indistinguishable") for r in rows)
        and all(float(r[3]) <= float(r[1]) <= float(r[4]) for r in rows)
    )
    identical = (
        (tmp_path / "a" / "points.csv").read_bytes()
        == (tmp_path / "b" / "points.csv").read_bytes()
    )
    report(9, "monotonicity probe: complete deterministic verdict table",
           complete and identical,
           f"points={len(rows)} deterministic={identical} elapsed={elapsed:.1f}s")


def test_criterion_10_reproducibility(tmp_path):
    plans = [
        dict(kind="sandwich", d=2, k=(2,), sizes=(12, 24), slab_sizes=(6, 12),
             hyper_sizes=(4, 8), runs=500, seed=77, n_boot=150),
        dict(kind="limit-trend", d=2, k_ladder=(2, 3), sizes=(12, 24),
             hyper_sizes=(4, 8), runs=500, seed=77, n_boot=150),
        dict(kind="conjecture", d=2, k=(2,), window=12, radius=4,
             p_grid=(0.2, 0.6, 0.05), runs=500, seed=77, n_boot=150),
    ]
    all_same = True
    for idx, kw in enumerate(plans):
        outs = []
        for threads, sub in ((1, "t1"), (3, "t3"), (1, "re")):
            out = tmp_path / f"{idx}_{sub}"
            run_study(StudyPlan(out_dir=str(out), threads=threads, **kw)).write()
            outs.append(out)
        names = sorted(p.name for p in outs[0].iterdir())
        for name in names:
            blobs = {(o / name).read_bytes() for o in outs}
            if len(blobs) != 1:
                all_same = False
    report(10, "byte-identical study outputs across reruns and thread counts",
           all_same)
