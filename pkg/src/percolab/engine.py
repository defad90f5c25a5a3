"""Monte Carlo percolation engine.

Site (default) and bond occupation on any graph view: union-find clustering,
occupation-ordered sweeps in the style of Newman and Ziff, binomial mixing to
fixed-probability curves, and reach/threshold estimators.

Determinism contract: every random quantity is a pure function of the master
seed, the view signature, the event, and the replica index.  Replica merges
are integer and order-free, so results are bit-identical for any thread
count, and identical for both kernel backends.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lattice import DECORATED, PRUNED, SLAB, GraphView, LatticeSpec
from .maps import VerificationReport, lattice_to_slab
from .rng import open_mask, stable_key, substream, substream_array

DEFAULT_SEED = 12345


# ---------------------------------------------------------------------------
# events


@dataclass(frozen=True)
class ReachEvent:
    """Origin cluster reaches L-infinity distance >= radius."""

    radius: int

    @property
    def label(self) -> str:
        return f"reach{self.radius}"


@dataclass(frozen=True)
class WrapEvent:
    """Some cluster winds around a periodic axis."""

    @property
    def label(self) -> str:
        return "wrap"


@dataclass(frozen=True)
class FaceEvent:
    """Some cluster joins the two opposite faces of a free axis."""

    axis: int = 0

    @property
    def label(self) -> str:
        return f"face{self.axis}"


Event = ReachEvent | WrapEvent | FaceEvent


# ---------------------------------------------------------------------------
# configurations and clusters


@dataclass
class SiteConfiguration:
    """Open/closed bit per dense vertex index, regenerable from (seed, p)."""

    open: np.ndarray
    p: float
    seed: int


@dataclass
class BondConfiguration:
    """Open/closed bit per undirected edge, in edge-list order."""

    open: np.ndarray
    p: float
    seed: int


def sample_configuration(view: GraphView, p: float, seed: int) -> SiteConfiguration:
    return SiteConfiguration(open=open_mask(seed, view.volume, p), p=p, seed=seed)


def sample_bond_configuration(view: GraphView, p: float, seed: int) -> BondConfiguration:
    n_edges = len(view.adjacency().undirected[0])
    return BondConfiguration(open=open_mask(seed, n_edges, p), p=p, seed=seed)


@dataclass
class UnionFindState:
    """Flattened union-find forest: parent[i] is the component root of i
    (every root points to itself; closed sites carry -1) and size[root] is
    the component cardinality."""

    parent: np.ndarray
    size: np.ndarray

    def root(self, i: int) -> int:
        return int(self.parent[i])

    def same(self, i: int, j: int) -> bool:
        ri, rj = self.parent[i], self.parent[j]
        return ri >= 0 and ri == rj

    def component(self, i: int) -> np.ndarray:
        r = self.parent[i]
        if r < 0:
            return np.empty(0, dtype=np.int64)
        return np.nonzero(self.parent == r)[0]


def _state_from_labels(labels: np.ndarray) -> UnionFindState:
    size = np.zeros(len(labels), dtype=np.int64)
    open_roots = labels[labels >= 0]
    if len(open_roots):
        counts = np.bincount(open_roots, minlength=len(labels))
        size[: len(counts)] = counts
    return UnionFindState(parent=labels, size=size)


def clusters(config: SiteConfiguration, view: GraphView) -> UnionFindState:
    """Union-find components of the open sites along the view's bonds."""
    adj = view.adjacency()
    if len(config.open) != view.volume:
        raise ValueError("configuration does not match the view volume")
    labels = np.empty(view.volume, dtype=np.int32)
    kernels.components_site(adj.indptr, adj.indices,
                            config.open.astype(np.uint8), labels)
    return _state_from_labels(labels.astype(np.int64))


def bond_clusters(config: BondConfiguration, view: GraphView) -> UnionFindState:
    """Components when bonds are open/closed and every site is present."""
    eu, ev, _ = view.adjacency().undirected
    if len(config.open) != len(eu):
        raise ValueError("configuration does not match the view edge count")
    labels = np.empty(view.volume, dtype=np.int32)
    kernels.components_bond(eu.astype(np.int32), ev.astype(np.int32), view.volume,
                            config.open.astype(np.uint8), labels)
    return _state_from_labels(labels.astype(np.int64))


def reach_event(config: SiteConfiguration, view: GraphView, radius: int,
                origin: int = 0) -> bool:
    """True when the origin is open and its cluster holds a vertex at
    L-infinity distance >= radius."""
    dist = view.linf_from_origin()
    if radius < 1 or not (dist >= radius).any():
        raise ValueError(f"radius {radius} exceeds the window")
    if not config.open[origin]:
        return False
    state = clusters(config, view)
    members = state.component(origin)
    return bool((dist[members] >= radius).any())


# ---------------------------------------------------------------------------
# occupation sweeps


@dataclass
class MicrocanonicalCurve:
    """Per-run first-hit occupation counts for one monotone event.

    ``mstar[r]`` is the occupation count at which the event first holds in
    run r (M + 1 when it never does); the microcanonical curve
    Q_m = P(event | m occupied) is the running fraction of runs with
    mstar <= m.
    """

    mstar: np.ndarray
    M: int
    runs: int
    event: str
    mode: str
    family: str
    d: int
    k_label: str
    size: int
    seed: int

    def counts(self) -> np.ndarray:
        return np.bincount(self.mstar, minlength=self.M + 2).astype(np.int64)

    @property
    def Q(self) -> np.ndarray:
        return np.cumsum(self.counts()[: self.M + 1]) / self.runs


def _curve_seed(view: GraphView, label: str, mode: str, seed: int) -> int:
    return stable_key(f"{view.signature()}|event={label}|mode={mode}", seed)


def _split_blocks(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    step = (n + parts - 1) // parts
    return [(a, min(a + step, n)) for a in range(0, n, step)]


def _dispatch(kernel, static_args: tuple, run_seeds: np.ndarray,
              mstar: np.ndarray, threads: int) -> None:
    if threads <= 1 or len(run_seeds) < 2:
        kernel(*static_args, run_seeds, mstar)
        return
    blocks = _split_blocks(len(run_seeds), threads)
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        futures = [
            pool.submit(kernel, *static_args, run_seeds[a:b], mstar[a:b])
            for a, b in blocks
        ]
        for f in futures:
            f.result()


def _wrap_args(view: GraphView, mode: str) -> tuple:
    if not any(view.window.periodic):
        raise ValueError("wrap event needs at least one periodic axis")
    if not view.wrap_safe:
        raise ValueError(
            "wrap detection needs every periodic extent to exceed twice the "
            "longest bond"
        )
    adj = view.adjacency()
    if mode == "site":
        return kernels.nz_wrap_site, (adj.indptr, adj.indices, adj.disp)
    eu, ev, disp = adj.undirected
    return kernels.nz_wrap_bond, (eu.astype(np.int32), ev.astype(np.int32),
                                  view.volume, disp)


def _face_args(view: GraphView, axis: int, mode: str) -> tuple:
    if view.window.sizes[axis] < 2:
        raise ValueError("face event needs axis size >= 2")
    mask = view.face_mask(axis)
    adj = view.adjacency()
    if mode == "site":
        return kernels.nz_face_site, (adj.indptr, adj.indices, mask)
    eu, ev, _ = adj.undirected
    return kernels.nz_face_bond, (eu.astype(np.int32), ev.astype(np.int32),
                                  view.volume, mask)


def _reach_args(view: GraphView, radii: tuple[int, ...], mode: str) -> tuple:
    if any(r < 1 for r in radii) or list(radii) != sorted(set(radii)):
        raise ValueError(f"radii must be strictly increasing and >= 1, got {radii}")
    mask = view.far_mask(radii)
    if not (mask & (1 << (len(radii) - 1))).any():
        raise ValueError(f"largest radius {radii[-1]} exceeds the window")
    adj = view.adjacency()
    if mode == "site":
        return kernels.nz_reach_site, (adj.indptr, adj.indices, mask, 0, len(radii))
    eu, ev, _ = adj.undirected
    return kernels.nz_reach_bond, (eu.astype(np.int32), ev.astype(np.int32),
                                   view.volume, mask, 0, len(radii))


def _sweep_size(view: GraphView, mode: str) -> int:
    if mode == "site":
        return view.volume
    return len(view.adjacency().undirected[0])


def _micro(view: GraphView, mstar: np.ndarray, label: str, mode: str,
           runs: int, seed: int) -> MicrocanonicalCurve:
    return MicrocanonicalCurve(
        mstar=mstar, M=_sweep_size(view, mode), runs=runs, event=label,
        mode=mode, family=view.family, d=view.spec.d,
        k_label=view.spec.k_label(), size=view.window.sizes[0], seed=seed,
    )


def reach_ladder(view: GraphView, radii: tuple[int, ...], runs: int, seed: int,
                 mode: str = "site", threads: int = 1) -> list[MicrocanonicalCurve]:
    """One sweep tracking several nested reach radii; one curve per radius.

    All radii share each run's insertion order, so the nesting
    mstar(r_small) <= mstar(r_large) holds exactly, run by run.
    """
    if runs < 1:
        raise ValueError("at least one run required")
    if mode not in ("site", "bond"):
        raise ValueError(f"mode must be site or bond, got {mode!r}")
    kernel, static = _reach_args(view, radii, mode)
    label = "reach[" + ",".join(str(r) for r in radii) + "]"
    run_seeds = substream_array(_curve_seed(view, label, mode, seed), runs)
    mstar = np.empty((runs, len(radii)), dtype=np.int32)
    _dispatch(kernel, static, run_seeds, mstar, threads)
    return [
        _micro(view, np.ascontiguousarray(mstar[:, j]), f"reach{r}", mode, runs, seed)
        for j, r in enumerate(radii)
    ]


def newman_ziff(view: GraphView, event: Event, runs: int, seed: int,
                mode: str = "site", threads: int = 1) -> MicrocanonicalCurve:
    """Occupation-ordered sweep for one monotone event."""
    if runs < 1:
        raise ValueError("at least one run required")
    if mode not in ("site", "bond"):
        raise ValueError(f"mode must be site or bond, got {mode!r}")
    if isinstance(event, ReachEvent):
        return reach_ladder(view, (event.radius,), runs, seed, mode, threads)[0]
    if isinstance(event, WrapEvent):
        kernel, static = _wrap_args(view, mode)
    elif isinstance(event, FaceEvent):
        kernel, static = _face_args(view, event.axis, mode)
    else:
        raise TypeError(f"unknown event {event!r}")
    run_seeds = substream_array(_curve_seed(view, event.label, mode, seed), runs)
    mstar = np.empty(runs, dtype=np.int32)
    _dispatch(kernel, static, run_seeds, mstar, threads)
    return _micro(view, mstar, event.label, mode, runs, seed)


# ---------------------------------------------------------------------------
# binomial mixing


def binomial_window(M: int, p: float, tol: float = 1e-15) -> tuple[int, np.ndarray, float]:
    """Binomial(M, p) weights around the mode, truncated below tol.

    Returns (lo, normalized weights for lo..hi, truncated mass).  The
    recurrence is seeded at the mode with weight 1, so tol is relative to the
    peak; the dropped tail mass is recovered exactly from the log-pmf of the
    mode.
    """
    mode = min(max(int((M + 1) * p), 0), M)
    log_pmf = (
        math.lgamma(M + 1) - math.lgamma(mode + 1) - math.lgamma(M - mode + 1)
        + mode * math.log(p) + (M - mode) * math.log1p(-p)
    )
    odds = p / (1.0 - p)
    up = [1.0]
    m = mode
    while m < M:
        w = up[-1] * (M - m) / (m + 1) * odds
        if w < tol:
            break
        up.append(w)
        m += 1
    down = []
    m = mode
    while m > 0:
        w = (down[-1] if down else 1.0) * m / (M - m + 1) / odds
        if w < tol:
            break
        down.append(w)
        m -= 1
    lo = mode - len(down)
    weights = np.array(down[::-1] + up, dtype=np.float64)
    total = weights.sum()
    truncated = max(0.0, 1.0 - total * math.exp(log_pmf))
    return lo, weights / total, truncated


@dataclass
class CanonicalCurve:
    """Fixed-probability event curve with per-point standard errors.

    Serializes to CSV with the fixed column order
    (p, Q, stderr, M, runs, seed, family, d, k, event, size).
    """

    p: np.ndarray
    Q: np.ndarray
    stderr: np.ndarray
    M: int
    runs: int
    seed: int
    family: str
    d: int
    k_label: str
    event: str
    size: int
    truncated_mass: float = 0.0

    CSV_HEADER = "p,Q,stderr,M,runs,seed,family,d,k,event,size"

    def rows(self) -> list[str]:
        out = []
        for p, q, se in zip(self.p, self.Q, self.stderr):
            out.append(
                f"{float(p)!r},{float(q)!r},{float(se)!r},{self.M},{self.runs},"
                f"{self.seed},{self.family},{self.d},{self.k_label},"
                f"{self.event},{self.size}"
            )
        return out


def _tail_moments(counts: np.ndarray, cum: np.ndarray, runs: int, M: int,
                  p: float) -> tuple[float, float, float]:
    """Mean and second moment of the per-run mixed indicator at one p."""
    if p <= 0.0:
        q = counts[0] / runs
        return q, q, 0.0
    if p >= 1.0:
        q = cum[M] / runs
        return q, q, 0.0
    lo, weights, truncated = binomial_window(M, p)
    hi = lo + len(weights) - 1
    tail = np.cumsum(weights[::-1])[::-1]  # tail[t - lo] = P(X >= t)
    below = cum[lo] - counts[lo]  # runs with mstar < lo contribute weight 1
    seg = counts[lo : hi + 1]
    q = (below + float(seg @ tail)) / runs
    m2 = (below + float(seg @ (tail * tail))) / runs
    return q, m2, truncated


def convolve(micro: MicrocanonicalCurve, p_grid: np.ndarray) -> CanonicalCurve:
    """Mix the occupation-ordered statistics with Binomial(M, p) weights."""
    p_grid = np.asarray(p_grid, dtype=np.float64)
    if len(p_grid) == 0 or (p_grid < 0).any() or (p_grid > 1).any():
        raise ValueError("p grid must be non-empty and within [0, 1]")
    counts = micro.counts()
    cum = np.cumsum(counts)
    Q = np.empty(len(p_grid))
    se = np.empty(len(p_grid))
    worst = 0.0
    for i, p in enumerate(p_grid):
        q, m2, truncated = _tail_moments(counts, cum, micro.runs, micro.M, float(p))
        Q[i] = q
        var = max(0.0, m2 - q * q)
        se[i] = math.sqrt(var / (micro.runs - 1)) if micro.runs > 1 else 0.0
        worst = max(worst, truncated)
    return CanonicalCurve(
        p=p_grid.copy(), Q=Q, stderr=se, M=micro.M, runs=micro.runs,
        seed=micro.seed, family=micro.family, d=micro.d, k_label=micro.k_label,
        event=micro.event, size=micro.size, truncated_mass=worst,
    )


def estimate_theta(view: GraphView, p_grid: np.ndarray, radii: tuple[int, ...],
                   runs: int, seed: int, mode: str = "site",
                   threads: int = 1) -> list[CanonicalCurve]:
    """Origin-reach curves, one per radius of the ladder."""
    micros = reach_ladder(view, tuple(radii), runs, seed, mode, threads)
    return [convolve(m, p_grid) for m in micros]


# ---------------------------------------------------------------------------
# threshold estimation by curve crossing


def isotonic_nondecreasing(y: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators projection onto nondecreasing sequences."""
    vals: list[float] = []
    weights: list[int] = []
    for v in np.asarray(y, dtype=np.float64):
        vals.append(float(v))
        weights.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            w = weights[-2] + weights[-1]
            vals[-2] = (vals[-2] * weights[-2] + vals[-1] * weights[-1]) / w
            weights[-2] = w
            del vals[-1], weights[-1]
    return np.repeat(vals, weights)


@dataclass
class ThresholdEstimate:
    """Crossing of the event curves at two linear sizes, or an explicit
    no-crossing report."""

    crossed: bool
    p_hat: float | None
    ci_low: float | None
    ci_high: float | None
    reason: str
    boot_failures: int
    curve_small: CanonicalCurve
    curve_large: CanonicalCurve
    provenance: dict = field(default_factory=dict)


def _crossings(p: np.ndarray, g: np.ndarray) -> list[tuple[int, float]]:
    """Indices i and interpolated roots where g passes from < 0 to >= 0."""
    out = []
    for i in range(len(g) - 1):
        if g[i] < 0.0 <= g[i + 1]:
            frac = -g[i] / (g[i + 1] - g[i]) if g[i + 1] != g[i] else 0.0
            out.append((i, float(p[i] + frac * (p[i + 1] - p[i]))))
    return out


def _tail_matrix(M: int, p_values: np.ndarray, t_values: np.ndarray) -> np.ndarray:
    """P(Binomial(M, p) >= t) for every (p, t) pair; shape (len p, len t)."""
    out = np.empty((len(p_values), len(t_values)))
    for i, p in enumerate(p_values):
        if p <= 0.0:
            out[i] = (t_values <= 0).astype(np.float64)
            continue
        if p >= 1.0:
            out[i] = (t_values <= M).astype(np.float64)
            continue
        lo, weights, _ = binomial_window(M, float(p))
        tail = np.cumsum(weights[::-1])[::-1]
        pos = np.clip(t_values - lo, 0, len(weights))
        padded = np.concatenate([tail, [0.0]])
        out[i] = np.where(t_values <= lo, 1.0, padded[pos])
    return out


def bootstrap_curve_band(micro: MicrocanonicalCurve, p_grid: np.ndarray,
                         n_boot: int = 2000, seed: int = DEFAULT_SEED,
                         ) -> tuple[np.ndarray, np.ndarray]:
    """95% percentile bootstrap band for the mixed curve on a p grid.

    Resamples the run-level first-hit counts (multinomially, equivalent to
    resampling runs with replacement) and remixes each resample.
    """
    p_grid = np.asarray(p_grid, dtype=np.float64)
    uniq, inverse = np.unique(micro.mstar, return_inverse=True)
    base = np.bincount(inverse, minlength=len(uniq))
    w_mat = _tail_matrix(micro.M, p_grid, uniq)
    pvals = base / micro.runs
    pvals[-1] = max(0.0, 1.0 - pvals[:-1].sum())
    label = (f"curve-bootstrap|{micro.family}|{micro.d}|{micro.k_label}|"
             f"{micro.size}|{micro.event}|{micro.mode}|runs={micro.runs}")
    rng = np.random.default_rng(stable_key(label, seed))
    q_boot = np.empty((n_boot, len(p_grid)))
    for b in range(n_boot):
        counts_b = rng.multinomial(micro.runs, pvals)
        q_boot[b] = w_mat @ counts_b / micro.runs
    lo, hi = np.percentile(q_boot, [2.5, 97.5], axis=0)
    return lo, hi


def estimate_pc(view_small: GraphView, view_large: GraphView, event: Event,
                runs: int, seed: int, mode: str = "site", threads: int = 1,
                p_step: float = 1e-3, n_boot: int = 2000,
                boot_halfwidth: float = 0.025) -> ThresholdEstimate:
    """Threshold from the crossing of the two finite-size event curves.

    Curves are smoothed isotonically before the sign-change search; the
    confidence interval is a percentile bootstrap over run-level resamples of
    both sweeps.  When the smoothed curves never cross in (0, 1) the result
    says so explicitly instead of inventing a number.
    """
    micro_s = newman_ziff(view_small, event, runs, seed, mode, threads)
    micro_l = newman_ziff(view_large, event, runs, seed, mode, threads)
    grid = np.linspace(0.0, 1.0, int(round(1.0 / p_step)) + 1)
    curve_s = convolve(micro_s, grid)
    curve_l = convolve(micro_l, grid)
    prov = {
        "runs": runs, "seed": seed, "event": micro_s.event, "mode": mode,
        "sizes": (view_small.window.sizes[0], view_large.window.sizes[0]),
        "p_step": p_step, "n_boot": n_boot,
    }
    qs = isotonic_nondecreasing(curve_s.Q)
    ql = isotonic_nondecreasing(curve_l.Q)
    g = ql - qs
    candidates = _crossings(grid, g)
    if not candidates:
        return ThresholdEstimate(
            crossed=False, p_hat=None, ci_low=None, ci_high=None,
            reason="smoothed curves have no negative-to-positive crossing in (0, 1)",
            boot_failures=0, curve_small=curve_s, curve_large=curve_l,
            provenance=prov,
        )
    half = (qs + ql) / 2.0
    p_half = grid[int(np.argmin(np.abs(half - 0.5)))]
    _, p_hat = min(candidates, key=lambda c: abs(c[1] - p_half))

    lo = max(p_step, p_hat - boot_halfwidth)
    hi = min(1.0 - p_step, p_hat + boot_halfwidth)
    wgrid = np.linspace(lo, hi, 21)
    boot_label = (f"pc-bootstrap|{view_small.signature()}|{view_large.signature()}"
                  f"|{micro_s.event}|{mode}|runs={runs}")
    rng = np.random.default_rng(stable_key(boot_label, seed))
    boots = np.empty(n_boot)
    failures = 0
    curves_bt = []
    for micro in (micro_s, micro_l):
        uniq, inv = np.unique(micro.mstar, return_inverse=True)
        base_counts = np.bincount(inv, minlength=len(uniq))
        w_mat = _tail_matrix(micro.M, wgrid, uniq)
        pvals = base_counts / runs
        pvals[-1] = max(0.0, 1.0 - pvals[:-1].sum())
        curves_bt.append((w_mat, pvals))
    n_ok = 0
    for b in range(n_boot):
        q_pair = []
        for w_mat, pvals in curves_bt:
            counts_b = rng.multinomial(runs, pvals)
            q_pair.append(w_mat @ counts_b / runs)
        roots = _crossings(wgrid, q_pair[1] - q_pair[0])
        if roots:
            boots[n_ok] = min(roots, key=lambda c: abs(c[1] - p_hat))[1]
            n_ok += 1
        else:
            failures += 1
    if n_ok >= max(100, n_boot // 10):
        ci_low, ci_high = np.percentile(boots[:n_ok], [2.5, 97.5])
        reason = ""
    else:
        ci_low = ci_high = None
        reason = f"bootstrap located a crossing in only {n_ok}/{n_boot} resamples"
    return ThresholdEstimate(
        crossed=True, p_hat=p_hat, ci_low=ci_low, ci_high=ci_high,
        reason=reason, boot_failures=failures, curve_small=curve_s,
        curve_large=curve_l, provenance=prov,
    )


def write_curves_csv(path: str, curves: list[CanonicalCurve]) -> None:
    """One CSV with the fixed column order; curves are concatenated in order."""
    from .fileio import atomic_write_text

    lines = [CanonicalCurve.CSV_HEADER]
    for curve in curves:
        lines.extend(curve.rows())
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# subgraph/isomorphism coupling checks


def transport_permutation(f_view: GraphView, s_view: GraphView) -> np.ndarray:
    """perm[i] = slab dense index of the decomposition image of lattice index i."""
    spec = f_view.spec
    perm = np.empty(f_view.volume, dtype=np.int64)
    for i in range(f_view.volume):
        perm[i] = s_view.vertex_index(lattice_to_slab(f_view.index_vertex(i), spec))
    return perm


def check_coupling(spec: LatticeSpec, extent: int, n_configs: int = 10_000,
                   seed: int = DEFAULT_SEED,
                   p_values: tuple[float, ...] = (0.15, 0.3, 0.45, 0.6, 0.75),
                   ) -> VerificationReport:
    """Per-configuration coupling checks on a periodic window.

    With the same open/closed field: the pruned-lattice origin cluster is
    contained in the decorated-lattice one, and mapping the field through the
    coordinate decomposition reproduces the slab origin cluster and its reach
    statistics exactly.
    """
    tag = f"coupling[d={spec.d},k=({spec.k_label()}),window={extent}]"
    report = VerificationReport()
    g_view = GraphView.build(DECORATED, spec, extent, periodic=True)
    f_view = GraphView.build(PRUNED, spec, extent, periodic=True)
    s_view = GraphView.build(SLAB, spec, extent // spec.period, periodic=True)
    perm = transport_permutation(f_view, s_view)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    dist = g_view.linf_from_origin()
    radii = sorted({max(1, extent // 4), max(1, extent // 2)})
    subset_ok = transport_ok = reach_ok = True
    witness_subset = witness_transport = witness_reach = ""
    for c in range(n_configs):
        p = p_values[c % len(p_values)]
        cfg = sample_configuration(g_view, p, substream(seed, c))
        labels_g = clusters(cfg, g_view).parent
        labels_f = clusters(cfg, f_view).parent
        if cfg.open[0]:
            members_f = np.nonzero(labels_f == labels_f[0])[0]
            if subset_ok and not (labels_g[members_f] == labels_g[0]).all():
                subset_ok = False
                bad = members_f[labels_g[members_f] != labels_g[0]][0]
                witness_subset = (
                    f"config {c} (p={p}): vertex {f_view.index_vertex(int(bad))} in "
                    f"the pruned origin cluster but not the decorated one"
                )
        else:
            members_f = np.empty(0, dtype=np.int64)
        s_cfg = SiteConfiguration(open=cfg.open[inv], p=p, seed=cfg.seed)
        labels_s = clusters(s_cfg, s_view).parent
        origin_s = int(perm[0])
        if s_cfg.open[origin_s]:
            members_s = np.nonzero(labels_s == labels_s[origin_s])[0]
        else:
            members_s = np.empty(0, dtype=np.int64)
        if transport_ok and not np.array_equal(np.sort(perm[members_f]), members_s):
            transport_ok = False
            witness_transport = (
                f"config {c} (p={p}): origin cluster image has "
                f"{len(members_f)} vertices vs {len(members_s)} on the slab"
            )
        if reach_ok:
            dist_s = dist[inv]  # transported metric on slab indices
            for r in radii:
                lhs = bool(len(members_f)) and bool((dist[members_f] >= r).any())
                rhs = bool(len(members_s)) and bool((dist_s[members_s] >= r).any())
                if lhs != rhs:
                    reach_ok = False
                    witness_reach = f"config {c} (p={p}): reach({r}) {lhs} vs {rhs}"
                    break
        if not (subset_ok or transport_ok or reach_ok):
            break
    report.add(f"{tag}.subgraph-cluster", subset_ok, witness_subset)
    report.add(f"{tag}.transport-cluster", transport_ok, witness_transport)
    report.add(f"{tag}.transport-reach", reach_ok, witness_reach)
    return report
