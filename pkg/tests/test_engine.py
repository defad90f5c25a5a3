from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from percolab.engine import (
    FaceEvent,
    MicrocanonicalCurve,
    ReachEvent,
    WrapEvent,
    bond_clusters,
    check_coupling,
    clusters,
    convolve,
    estimate_pc,
    estimate_theta,
    newman_ziff,
    reach_event,
    reach_ladder,
    sample_bond_configuration,
    sample_configuration,
    write_curves_csv,
)
from percolab.lattice import DECORATED, FAMILIES, PRUNED, GraphView, LatticeSpec
from percolab.maps import lattice_to_slab


def bfs_partition(view, open_bits):
    """Independent oracle: BFS components over scalar neighbor enumeration."""
    seen = {}
    for i in range(view.volume):
        if not open_bits[i] or i in seen:
            continue
        comp = []
        queue = deque([i])
        seen[i] = i
        while queue:
            x = queue.popleft()
            comp.append(x)
            for u in view.neighbors(view.index_vertex(x)):
                ui = view.vertex_index(u)
                if open_bits[ui] and ui not in seen:
                    seen[ui] = i
                    queue.append(ui)
        yield frozenset(comp)


def uf_partition(state, open_bits):
    groups = {}
    for i, root in enumerate(state.parent):
        if open_bits[i]:
            groups.setdefault(int(root), []).append(i)
    return {frozenset(v) for v in groups.values()}


class TestSampling:
    def test_extremes(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        assert not sample_configuration(view, 0.0, 5).open.any()
        assert sample_configuration(view, 1.0, 5).open.all()

    def test_deterministic(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        a = sample_configuration(view, 0.37, 99).open
        b = sample_configuration(view, 0.37, 99).open
        assert np.array_equal(a, b)
        c = sample_configuration(view, 0.37, 100).open
        assert not np.array_equal(a, c)

    def test_mean_near_p(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 64, periodic=True)
        means = [sample_configuration(view, 0.3, s).open.mean() for s in range(8)]
        # pooled over 8 * 4096 draws: 4 sigma is about 0.01
        assert abs(np.mean(means) - 0.3) < 0.01

    def test_invalid_p(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        with pytest.raises(ValueError):
            sample_configuration(view, 1.5, 0)


class TestClusters:
    def test_all_open_single_cluster(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 6, periodic=True)
        state = clusters(sample_configuration(view, 1.0, 0), view)
        assert len({int(r) for r in state.parent}) == 1
        assert state.size.max() == view.volume

    def test_all_closed(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 6, periodic=True)
        state = clusters(sample_configuration(view, 0.0, 0), view)
        assert (state.parent == -1).all()

    def test_find_idempotent_flat_forest(self):
        view = GraphView.build("g", LatticeSpec(1, (3,)), 12, periodic=True)
        state = clusters(sample_configuration(view, 0.6, 3), view)
        for i in range(view.volume):
            r = state.parent[i]
            assert r == -1 or state.parent[r] == r

    @pytest.mark.parametrize("family", FAMILIES)
    def test_matches_bfs_oracle(self, family):
        spec = LatticeSpec(2, (2,)) if family != "zd" else LatticeSpec(2, (2,))
        for trial in range(8):
            periodic = trial % 2 == 0
            extent = 6 if family in (DECORATED, PRUNED) else 4
            view = GraphView.build(family, spec, extent, periodic=periodic)
            cfg = sample_configuration(view, 0.2 + 0.1 * trial, 1000 + trial)
            state = clusters(cfg, view)
            assert uf_partition(state, cfg.open) == set(bfs_partition(view, cfg.open))

    def test_bond_clusters_match_bond_bfs(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 5, periodic=True)
        eu, ev, _ = view.adjacency().undirected
        cfg = sample_bond_configuration(view, 0.4, 17)
        state = bond_clusters(cfg, view)
        # oracle: BFS over the open-edge list
        adj = {i: [] for i in range(view.volume)}
        for (a, b), is_open in zip(zip(eu.tolist(), ev.tolist()), cfg.open):
            if is_open:
                adj[a].append(b)
                adj[b].append(a)
        seen = {}
        parts = set()
        for i in range(view.volume):
            if i in seen:
                continue
            comp, queue = [], deque([i])
            seen[i] = True
            while queue:
                x = queue.popleft()
                comp.append(x)
                for u in adj[x]:
                    if u not in seen:
                        seen[u] = True
                        queue.append(u)
            parts.add(frozenset(comp))
        assert uf_partition(state, np.ones(view.volume, bool)) == parts


class TestReachEvent:
    def test_closed_origin(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        cfg = sample_configuration(view, 0.0, 1)
        assert reach_event(cfg, view, radius=3) is False

    def test_full_lattice(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        cfg = sample_configuration(view, 1.0, 1)
        assert reach_event(cfg, view, radius=4) is True

    def test_short_line_fails(self):
        view = GraphView.build("zd", LatticeSpec(1, ()), 16, periodic=True)
        open_bits = np.zeros(16, dtype=bool)
        open_bits[[0, 1, 2]] = True  # cluster of L-infinity span 2
        cfg = sample_configuration(view, 0.0, 1)
        cfg.open = open_bits
        assert reach_event(cfg, view, radius=3) is False
        assert reach_event(cfg, view, radius=2) is True

    def test_radius_beyond_window(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        cfg = sample_configuration(view, 0.5, 1)
        with pytest.raises(ValueError):
            reach_event(cfg, view, radius=40)


class TestSweeps:
    def test_monotone_curve_and_endpoints(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        micro = newman_ziff(view, WrapEvent(), runs=50, seed=3)
        q = micro.Q
        assert q[0] == 0.0
        assert q[-1] == 1.0  # wrap certain once every site is occupied
        assert (np.diff(q) >= 0).all()

    def test_reach_requires_origin(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        micro = newman_ziff(view, ReachEvent(3), runs=50, seed=3)
        assert micro.Q[0] == 0.0
        assert (micro.mstar >= 1).all()

    def test_ladder_nesting(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 12, periodic=True)
        micros = reach_ladder(view, (2, 4, 6), runs=60, seed=9)
        assert micros[0].event == "reach2"
        for small, large in zip(micros, micros[1:]):
            assert (small.mstar <= large.mstar).all()

    def test_deterministic_and_thread_invariant(self):
        view = GraphView.build("g", LatticeSpec(2, (2,)), 8, periodic=True)
        a = newman_ziff(view, WrapEvent(), runs=64, seed=5, threads=1)
        b = newman_ziff(view, WrapEvent(), runs=64, seed=5, threads=4)
        assert np.array_equal(a.mstar, b.mstar)
        c = newman_ziff(view, WrapEvent(), runs=64, seed=6, threads=1)
        assert not np.array_equal(a.mstar, c.mstar)

    def test_wrap_needs_periodic_axis(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=False)
        with pytest.raises(ValueError):
            newman_ziff(view, WrapEvent(), runs=5, seed=1)

    def test_wrap_needs_wide_window(self):
        view = GraphView.build("g", LatticeSpec(1, (3,)), 6, periodic=True)
        with pytest.raises(ValueError):
            newman_ziff(view, WrapEvent(), runs=5, seed=1)

    def test_face_needs_free_axis(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        with pytest.raises(ValueError):
            newman_ziff(view, FaceEvent(0), runs=5, seed=1)

    def test_bond_mode_wrap(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 8, periodic=True)
        micro = newman_ziff(view, WrapEvent(), runs=50, seed=3, mode="bond")
        assert micro.M == len(view.adjacency().undirected[0])
        assert micro.Q[-1] == 1.0


class TestConvolve:
    def test_analytic_power(self):
        micro = MicrocanonicalCurve(
            mstar=np.array([2], dtype=np.int32), M=2, runs=1, event="e",
            mode="site", family="zd", d=2, k_label="", size=1, seed=0,
        )
        grid = np.linspace(0, 1, 21)
        curve = convolve(micro, grid)
        assert np.abs(curve.Q - grid**2).max() < 1e-12

    def test_analytic_linear(self):
        micro = MicrocanonicalCurve(
            mstar=np.array([1], dtype=np.int32), M=1, runs=1, event="e",
            mode="site", family="zd", d=2, k_label="", size=1, seed=0,
        )
        grid = np.linspace(0, 1, 11)
        curve = convolve(micro, grid)
        assert np.abs(curve.Q - grid).max() < 1e-12

    def test_constant_mixture(self):
        micro = MicrocanonicalCurve(
            mstar=np.array([0, 11], dtype=np.int32), M=10, runs=2, event="e",
            mode="site", family="zd", d=2, k_label="", size=1, seed=0,
        )
        curve = convolve(micro, np.linspace(0, 1, 31))
        assert np.abs(curve.Q - 0.5).max() < 1e-12

    def test_large_m_analytic(self):
        # Q_m = 1 for every m >= 1: the curve is 1 - (1-p)^M
        M = 4096
        micro = MicrocanonicalCurve(
            mstar=np.array([1], dtype=np.int32), M=M, runs=1, event="e",
            mode="site", family="zd", d=2, k_label="", size=1, seed=0,
        )
        grid = np.array([0.0, 1e-4, 1e-3, 0.3, 1.0])
        curve = convolve(micro, grid)
        want = 1.0 - (1.0 - grid) ** M
        assert np.abs(curve.Q - want).max() < 1e-12
        assert curve.truncated_mass < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(m=st.integers(1, 200), p=st.floats(0.001, 0.999))
    def test_weights_normalized(self, m, p):
        from percolab.engine import binomial_window

        lo, weights, truncated = binomial_window(m, p)
        assert abs(weights.sum() - 1.0) < 1e-12
        assert truncated < 1e-11
        assert 0 <= lo <= m

    def test_endpoints_match_micro(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 6, periodic=True)
        micro = newman_ziff(view, WrapEvent(), runs=30, seed=1)
        curve = convolve(micro, np.array([0.0, 1.0]))
        assert curve.Q[0] == micro.Q[0]
        assert curve.Q[1] == micro.Q[-1]

    @settings(max_examples=30, deadline=None)
    @given(m_total=st.integers(1, 60), data=st.data())
    def test_matches_exact_binomial_sum(self, m_total, data):
        # oracle: the full binomial mixture evaluated term by term
        from math import comb

        runs = data.draw(st.integers(1, 6))
        mstar = np.array(
            [data.draw(st.integers(0, m_total + 1)) for _ in range(runs)],
            dtype=np.int32,
        )
        micro = MicrocanonicalCurve(
            mstar=mstar, M=m_total, runs=runs, event="e", mode="site",
            family="zd", d=2, k_label="", size=1, seed=0)
        q_m = micro.Q
        for p in (0.0, 0.123, 0.5, 0.87, 1.0):
            want = sum(
                comb(m_total, m) * p**m * (1 - p) ** (m_total - m) * q_m[m]
                for m in range(m_total + 1)
            )
            got = convolve(micro, np.array([p])).Q[0]
            assert abs(got - want) < 1e-12


class TestThetaEstimation:
    def test_endpoint_values_and_radius_monotonicity(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 16, periodic=True)
        grid = np.array([0.0, 0.45, 0.55, 0.65, 1.0])
        curves = estimate_theta(view, grid, (3, 6), runs=400, seed=2)
        for curve in curves:
            assert curve.Q[0] == 0.0
            assert curve.Q[-1] == 1.0
        assert (curves[1].Q <= curves[0].Q + 1e-15).all()

    def test_between_zero_and_one_supercritical(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 48, periodic=True)
        curves = estimate_theta(view, np.array([0.7]), (16,), runs=800, seed=4)
        q = curves[0].Q[0]
        assert 0.0 < q < 1.0

    def test_radius_validation(self):
        view = GraphView.build("zd", LatticeSpec(2, ()), 16, periodic=True)
        grid = np.array([0.5])
        with pytest.raises(ValueError):
            estimate_theta(view, grid, (4, 2), runs=10, seed=1)  # not increasing
        with pytest.raises(ValueError):
            estimate_theta(view, grid, (0, 2), runs=10, seed=1)  # radius < 1
        with pytest.raises(ValueError):
            estimate_theta(view, grid, (99,), runs=10, seed=1)  # beyond window


class TestThresholds:
    def test_bond_square_lattice_exact_half(self):
        # the square-lattice bond threshold is exactly 1/2
        spec = LatticeSpec(2, ())
        small = GraphView.build("zd", spec, 32, periodic=True)
        large = GraphView.build("zd", spec, 64, periodic=True)
        est = estimate_pc(small, large, WrapEvent(), runs=3000, seed=7,
                          mode="bond", n_boot=400)
        assert est.crossed
        assert abs(est.p_hat - 0.5) < 0.01

    def test_identical_views_report_no_crossing(self):
        spec = LatticeSpec(2, ())
        view = GraphView.build("zd", spec, 16, periodic=True)
        est = estimate_pc(view, view, WrapEvent(), runs=300, seed=7, n_boot=100)
        assert not est.crossed
        assert est.p_hat is None
        assert "crossing" in est.reason

    def test_step_curves_cross_at_step(self):
        # fault injection: one-run step curves at the same occupation fraction
        # but different sharpness intersect at the common step location
        from percolab.engine import _crossings, isotonic_nondecreasing

        grid = np.linspace(0, 1, 1001)
        micro_shallow = MicrocanonicalCurve(
            mstar=np.array([45], dtype=np.int32), M=100, runs=1, event="e",
            mode="site", family="zd", d=2, k_label="", size=1, seed=0)
        micro_steep = MicrocanonicalCurve(
            mstar=np.array([4500], dtype=np.int32), M=10000, runs=1, event="e",
            mode="site", family="zd", d=2, k_label="", size=1, seed=0)
        qs = isotonic_nondecreasing(convolve(micro_shallow, grid).Q)
        ql = isotonic_nondecreasing(convolve(micro_steep, grid).Q)
        roots = _crossings(grid, ql - qs)
        assert len(roots) >= 1
        assert abs(roots[0][1] - 0.45) < 0.02

    def test_deterministic_across_threads(self):
        spec = LatticeSpec(2, ())
        small = GraphView.build("zd", spec, 8, periodic=True)
        large = GraphView.build("zd", spec, 16, periodic=True)
        a = estimate_pc(small, large, WrapEvent(), runs=400, seed=3, n_boot=150, threads=1)
        b = estimate_pc(small, large, WrapEvent(), runs=400, seed=3, n_boot=150, threads=3)
        assert a.p_hat == b.p_hat
        assert a.ci_low == b.ci_low and a.ci_high == b.ci_high

    def test_isomorphic_families_agree_on_threshold(self):
        # the decorated lattice and the decorated slab are the same graph up
        # to relabeling (windings included), so their wrap thresholds are the
        # same function of p; independent streams must agree within noise
        spec = LatticeSpec(2, (3,))
        g_est = estimate_pc(
            GraphView.build(DECORATED, spec, 18, periodic=True),
            GraphView.build(DECORATED, spec, 36, periodic=True),
            WrapEvent(), runs=2500, seed=31, n_boot=300)
        st_est = estimate_pc(
            GraphView.build("slab-tilde", spec, 6, periodic=True),
            GraphView.build("slab-tilde", spec, 12, periodic=True),
            WrapEvent(), runs=2500, seed=77, n_boot=300)
        assert g_est.crossed and st_est.crossed
        slack = (g_est.ci_high - g_est.ci_low) + (st_est.ci_high - st_est.ci_low)
        assert abs(g_est.p_hat - st_est.p_hat) < 2.0 * slack


class TestCouplingChecks:
    @pytest.mark.parametrize("spec,extent", [
        (LatticeSpec(1, (3,)), 9),
        (LatticeSpec(1, (2, 3)), 12),
        (LatticeSpec(2, (2,)), 8),
    ], ids=str)
    def test_pass(self, spec, extent):
        report = check_coupling(spec, extent, n_configs=300, seed=8)
        assert report.passed, report.text()

    def test_subgraph_coupling_per_configuration(self):
        spec = LatticeSpec(2, (3,))
        g = GraphView.build(DECORATED, spec, 9, periodic=True)
        f = GraphView.build(PRUNED, spec, 9, periodic=True)
        for trial in range(20):
            cfg = sample_configuration(g, 0.45, trial)
            if not cfg.open[0]:
                continue
            cf = clusters(cfg, f)
            cg = clusters(cfg, g)
            members_f = set(cf.component(0).tolist())
            members_g = set(cg.component(0).tolist())
            assert members_f <= members_g

    def test_reach_implication_pruned_to_decorated(self):
        # same field: reaching on the pruned lattice implies reaching on the
        # decorated one (origin cluster can only grow with extra bonds)
        spec = LatticeSpec(2, (2,))
        g = GraphView.build(DECORATED, spec, 8, periodic=True)
        f = GraphView.build(PRUNED, spec, 8, periodic=True)
        hits = 0
        for trial in range(40):
            cfg = sample_configuration(g, 0.5, 2000 + trial)
            for radius in (2, 4):
                on_f = reach_event(cfg, f, radius=radius)
                on_g = reach_event(cfg, g, radius=radius)
                assert (not on_f) or on_g
                hits += on_f
        assert hits > 0  # the implication was exercised, not vacuous

    def test_transported_cluster_equality(self):
        spec = LatticeSpec(1, (3,))
        f = GraphView.build(PRUNED, spec, 27, periodic=True)
        s = GraphView.build("slab", spec, 9, periodic=True)
        for trial in range(20):
            cfg = sample_configuration(f, 0.55, 100 + trial)
            perm = np.array([
                s.vertex_index(lattice_to_slab(f.index_vertex(i), spec))
                for i in range(f.volume)
            ])
            inv = np.empty_like(perm)
            inv[perm] = np.arange(len(perm))
            from percolab.engine import SiteConfiguration

            s_cfg = SiteConfiguration(open=cfg.open[inv], p=cfg.p, seed=cfg.seed)
            cf = clusters(cfg, f)
            cs = clusters(s_cfg, s)
            if cfg.open[0]:
                lhs = np.sort(perm[cf.component(0)])
                rhs = cs.component(int(perm[0]))
                assert np.array_equal(lhs, rhs)


class TestCurveCsv:
    def test_header_and_rows(self, tmp_path):
        view = GraphView.build("g", LatticeSpec(2, (2,)), 8, periodic=True)
        micro = newman_ziff(view, WrapEvent(), runs=20, seed=1)
        curve = convolve(micro, np.linspace(0, 1, 5))
        path = tmp_path / "curve.csv"
        write_curves_csv(str(path), [curve])
        lines = path.read_text().splitlines()
        assert lines[0] == "p,Q,stderr,M,runs,seed,family,d,k,event,size"
        assert len(lines) == 6
        fields = lines[1].split(",")
        assert fields[3] == "64" and fields[6] == "g" and fields[8] == "2"
        assert fields[9] == "wrap" and fields[10] == "8"
