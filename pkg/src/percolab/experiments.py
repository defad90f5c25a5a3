"""Study orchestration: threshold sandwich, limit trend, monotonicity probe.

Each study materializes an EstimateReport plus deterministic files: one CSV
per mixed curve, one summary CSV, optional SVG.  Rerunning a plan with the
same seed reproduces every byte, for any thread count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    DEFAULT_SEED,
    CanonicalCurve,
    ThresholdEstimate,
    WrapEvent,
    bootstrap_curve_band,
    convolve,
    estimate_pc,
    estimate_theta,
    reach_ladder,
    write_curves_csv,
)
from .fileio import atomic_write_text
from .lattice import DECORATED, HYPERCUBIC, SLAB, GraphView, LatticeSpec
from .svgplot import Series, VLine, render

STUDY_KINDS = ("sandwich", "limit-trend", "conjecture", "theta-curves")

SUMMARY_HEADER = ("study,label,family,d,k,sizes,event,mode,runs,seed,"
                  "value,ci_low,ci_high,verdict,detail")
POINTS_HEADER = ("p,theta_a,se_a,lo_a,hi_a,theta_b,se_b,lo_b,hi_b,verdict")


@dataclass(frozen=True)
class StudyPlan:
    """Inputs of one study; the single source of provenance."""

    kind: str
    d: int = 2
    k: tuple[int, ...] = (4,)
    k_ladder: tuple[int, ...] = (2, 3, 5, 8)
    sizes: tuple[int, int] = (64, 128)
    slab_sizes: tuple[int, int] = (24, 48)
    hyper_sizes: tuple[int, int] = (8, 16)
    window: int = 96
    radius: int = 24
    radii: tuple[int, ...] = ()
    p_grid: tuple[float, float, float] = (0.15, 0.55, 0.02)
    runs: int = 10_000
    seed: int = DEFAULT_SEED
    threads: int = 1
    mode: str = "site"
    boundary: str = "periodic"
    out_dir: str = "out"
    svg: bool = False
    n_boot: int = 2000
    graph: str = DECORATED

    def __post_init__(self):
        if self.kind not in STUDY_KINDS:
            raise ValueError(f"study kind must be one of {STUDY_KINDS}, got {self.kind!r}")
        if self.mode not in ("site", "bond"):
            raise ValueError(f"mode must be site or bond, got {self.mode!r}")
        if self.boundary not in ("periodic", "free"):
            raise ValueError(f"boundary must be periodic or free, got {self.boundary!r}")
        LatticeSpec(self.d, self.k)  # validates d and every factor
        start, stop, step = self.p_grid
        if not (0 <= start <= stop <= 1 and step > 0):
            raise ValueError(f"p grid {self.p_grid} must be sorted within [0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")

    def grid(self) -> np.ndarray:
        start, stop, step = self.p_grid
        n = int(math.floor((stop - start) / step + 1.5))
        return np.round(start + step * np.arange(n), 12)

    def spec(self) -> LatticeSpec:
        return LatticeSpec(self.d, self.k)


def parse_plan_file(path: str) -> dict[str, str]:
    """Flat key=value plan format; '#' starts a comment."""
    out: dict[str, str] = {}
    with open(path) as handle:
        for ln, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value, got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(x) for x in text.split(","))


def plan_from_mapping(raw: dict[str, str]) -> StudyPlan:
    """Build a plan from flat string keys (plan files and CLI merging)."""
    kw: dict = {}
    for key, value in raw.items():
        if key in ("d", "window", "radius", "runs", "seed", "threads", "n_boot"):
            kw[key] = int(value)
        elif key in ("k", "k_ladder", "radii"):
            kw[key] = _ints(value)
        elif key in ("sizes", "slab_sizes", "hyper_sizes"):
            pair = _ints(value)
            if len(pair) != 2:
                raise ValueError(f"{key} needs exactly two sizes, got {value!r}")
            kw[key] = pair
        elif key == "p_grid":
            a, b, c = value.split(":")
            kw[key] = (float(a), float(b), float(c))
        elif key == "svg":
            kw[key] = value.strip().lower() in ("1", "true", "yes")
        elif key in ("kind", "mode", "boundary", "out_dir", "graph"):
            kw[key] = value
        else:
            raise ValueError(f"unknown plan key {key!r}")
    if "kind" not in kw:
        raise ValueError("plan must declare kind=<sandwich|limit-trend|conjecture|theta-curves>")
    return StudyPlan(**kw)


# ---------------------------------------------------------------------------
# verdicts and reports


def interval_verdict(lo_a: float, hi_a: float, lo_b: float, hi_b: float) -> str:
    """ordered when a sits strictly below b at 95%, inverted when strictly
    above, indistinguishable on any overlap."""
    if hi_a < lo_b:
        return "ordered"
    if hi_b < lo_a:
        return "inverted"
    return "indistinguishable"


def _bounds(est: ThresholdEstimate) -> tuple[float, float]:
    if est.ci_low is not None and est.ci_high is not None:
        return est.ci_low, est.ci_high
    return est.p_hat, est.p_hat


@dataclass
class Verdict:
    label: str
    verdict: str
    backed_by: str  # "theorem" or "simulation"
    detail: str = ""


@dataclass
class EstimateReport:
    """Study outputs: estimates, curves, verdicts, and full provenance."""

    study: str
    plan: StudyPlan
    thresholds: dict[str, ThresholdEstimate] = field(default_factory=dict)
    curves: dict[str, CanonicalCurve] = field(default_factory=dict)
    bands: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    points: list[str] = field(default_factory=list)  # per-point verdict rows
    notes: list[str] = field(default_factory=list)

    def summary_rows(self) -> list[str]:
        plan = self.plan
        rows = []

        def fmt(x) -> str:
            return "" if x is None else repr(float(x))

        for label, est in self.thresholds.items():
            family, rest = label.split("@", 1)
            size_pair = rest.split("|", 1)[0]
            rows.append(
                f"{self.study},pc:{label},{family},{plan.d},"
                f"{_k_of(label, plan)},{size_pair},"
                f"{est.curve_small.event},{plan.mode},{plan.runs},{plan.seed},"
                f"{fmt(est.p_hat)},{fmt(est.ci_low)},{fmt(est.ci_high)},"
                f"{'crossed' if est.crossed else 'no-crossing'},{est.reason}"
            )
        for label, curve in self.curves.items():
            rows.append(
                f"{self.study},theta:{label},{curve.family},{curve.d},"
                f"{curve.k_label},{curve.size},{curve.event},{plan.mode},"
                f"{plan.runs},{plan.seed},,,,,"
            )
        for v in self.verdicts:
            rows.append(
                f"{self.study},order:{v.label},,,,,,,{plan.runs},{plan.seed},"
                f",,,{v.verdict},[{v.backed_by}] {v.detail}"
            )
        for note in self.notes:
            rows.append(f"{self.study},note,,,,,,,{plan.runs},{plan.seed},,,,,{note}")
        return rows

    def write(self, out_dir: str | None = None) -> list[str]:
        """Write per-curve CSVs, the summary CSV, the per-point table for
        probes, and the optional SVG; returns the paths."""
        out = out_dir if out_dir is not None else self.plan.out_dir
        os.makedirs(out, exist_ok=True)
        paths = []
        for label, est in self.thresholds.items():
            path = os.path.join(out, f"curves_{_slug(label)}.csv")
            write_curves_csv(path, [est.curve_small, est.curve_large])
            paths.append(path)
        for label, curve in self.curves.items():
            path = os.path.join(out, f"curve_{_slug(label)}.csv")
            write_curves_csv(path, [curve])
            paths.append(path)
        if self.points:
            path = os.path.join(out, "points.csv")
            atomic_write_text(path, "\n".join([POINTS_HEADER] + self.points) + "\n")
            paths.append(path)
        summary = os.path.join(out, "summary.csv")
        atomic_write_text(summary, "\n".join([SUMMARY_HEADER] + self.summary_rows()) + "\n")
        paths.append(summary)
        if self.plan.svg:
            path = os.path.join(out, f"{self.study}.svg")
            emit_plot(self, path)
            paths.append(path)
        return paths


def _slug(label: str) -> str:
    for a, b in (("@", "_"), ("|", "_"), ("=", ""), (",", "x")):
        label = label.replace(a, b)
    return label


def _k_of(label: str, plan: StudyPlan) -> str:
    if label.startswith("zd"):
        return ""
    if "|k=" in label:
        return label.split("|k=", 1)[1]
    return "x".join(str(x) for x in plan.k)


def emit_plot(report: EstimateReport, path: str) -> None:
    """Self-contained SVG with curves, bands, and threshold markers."""
    series = []
    for label, est in report.thresholds.items():
        for curve in (est.curve_small, est.curve_large):
            keep = np.ones(len(curve.p), dtype=bool)
            series.append(Series(
                x=[float(p) for p in curve.p[keep]],
                y=[float(q) for q in curve.Q[keep]],
                label=f"{label} L={curve.size}",
            ))
    for label, curve in report.curves.items():
        lo, hi = report.bands.get(label, (None, None))
        series.append(Series(
            x=[float(p) for p in curve.p],
            y=[float(q) for q in curve.Q],
            lo=[float(v) for v in lo] if lo is not None else [],
            hi=[float(v) for v in hi] if hi is not None else [],
            label=label,
        ))
    vlines = [
        VLine(est.p_hat, f"pc {label}={est.p_hat:.4f}")
        for label, est in report.thresholds.items()
        if est.crossed and est.p_hat is not None
    ]
    render(path, series, vlines, title=report.study)


# ---------------------------------------------------------------------------
# study runners


def _pc_pair(family: str, spec: LatticeSpec, sizes: tuple[int, int],
             plan: StudyPlan) -> ThresholdEstimate:
    small = GraphView.build(family, spec, sizes[0], periodic=True)
    large = GraphView.build(family, spec, sizes[1], periodic=True)
    return estimate_pc(
        small, large, WrapEvent(), plan.runs, plan.seed, mode=plan.mode,
        threads=plan.threads, n_boot=plan.n_boot,
    )


def run_sandwich(plan: StudyPlan) -> EstimateReport:
    """Estimate the three thresholds of the sandwich with one methodology and
    report both orderings with uncertainty verdicts."""
    if plan.kind != "sandwich":
        raise ValueError(f"plan kind {plan.kind!r} is not sandwich")
    spec = plan.spec()
    report = EstimateReport(study="sandwich", plan=plan)
    report.thresholds[f"zd@{plan.hyper_sizes[0]}x{plan.hyper_sizes[1]}"] = _pc_pair(
        HYPERCUBIC, spec, plan.hyper_sizes, plan)
    report.thresholds[f"g@{plan.sizes[0]}x{plan.sizes[1]}"] = _pc_pair(
        DECORATED, spec, plan.sizes, plan)
    report.thresholds[f"slab@{plan.slab_sizes[0]}x{plan.slab_sizes[1]}"] = _pc_pair(
        SLAB, spec, plan.slab_sizes, plan)
    ests = list(report.thresholds.values())
    labels = list(report.thresholds.keys())
    pairs = [(0, 1, "pc(zd) <= pc(g)"), (1, 2, "pc(g) <= pc(slab)")]
    for a, b, title in pairs:
        ea, eb = ests[a], ests[b]
        if not (ea.crossed and eb.crossed):
            report.verdicts.append(Verdict(title, "indistinguishable", "theorem",
                                           "missing crossing"))
            continue
        verdict = interval_verdict(*_bounds(ea), *_bounds(eb))
        detail = (f"{labels[a]}={ea.p_hat:.5f} vs {labels[b]}={eb.p_hat:.5f}; "
                  f"ordering is proven for these families, simulation "
                  f"{'consistent' if verdict != 'inverted' else 'INCONSISTENT'}")
        report.verdicts.append(Verdict(title, verdict, "theorem", detail))
    return report


def _ladder_sizes(k: int, base: tuple[int, int]) -> tuple[int, int]:
    """Round the base pair to multiples of k, keeping the exact 2x ratio and
    enough width for winding detection."""
    small = k * max(3, round(base[0] / k))
    return small, 2 * small


def run_limit_trend(plan: StudyPlan) -> EstimateReport:
    """Threshold ladder over single-scale factors against the hypercubic
    reference; checks the nonincreasing trend and the gap contraction."""
    if plan.kind != "limit-trend":
        raise ValueError(f"plan kind {plan.kind!r} is not limit-trend")
    if not plan.k_ladder:
        raise ValueError("limit-trend needs a nonempty k ladder")
    report = EstimateReport(study="limit-trend", plan=plan)
    ref_spec = LatticeSpec(plan.d, (plan.k_ladder[0],))
    ref_label = f"zd@{plan.hyper_sizes[0]}x{plan.hyper_sizes[1]}"
    report.thresholds[ref_label] = _pc_pair(HYPERCUBIC, ref_spec, plan.hyper_sizes, plan)
    seen: dict[int, str] = {}
    for k in plan.k_ladder:
        sizes = _ladder_sizes(k, plan.sizes)
        label = f"g@{sizes[0]}x{sizes[1]}|k={k}"
        report.thresholds[label] = _pc_pair(DECORATED, LatticeSpec(plan.d, (k,)), sizes, plan)
        if k in seen:
            report.notes.append(f"ladder repeats k={k}; estimates coincide by construction")
        seen[k] = label
    ladder_labels = [lbl for lbl in report.thresholds if lbl.startswith("g@")]
    ests = [report.thresholds[lbl] for lbl in ladder_labels]
    ref = report.thresholds[ref_label]
    for (ka, lbl_a, ea), (kb, lbl_b, eb) in zip(
        zip(plan.k_ladder, ladder_labels, ests),
        zip(plan.k_ladder[1:], ladder_labels[1:], ests[1:]),
    ):
        if not (ea.crossed and eb.crossed):
            report.verdicts.append(Verdict(f"pc(k={kb}) <= pc(k={ka})",
                                           "indistinguishable", "simulation",
                                           "missing crossing"))
            continue
        verdict = interval_verdict(*_bounds(eb), *_bounds(ea))
        name = "nonincreasing" if verdict in ("ordered", "indistinguishable") else "INVERTED"
        report.verdicts.append(Verdict(
            f"pc(k={kb}) <= pc(k={ka})", verdict, "simulation",
            f"{eb.p_hat:.5f} vs {ea.p_hat:.5f} ({name} within CI)"))
    if ref.crossed and ests[0].crossed and ests[-1].crossed:
        first_gap = ests[0].p_hat - ref.p_hat
        last_gap = ests[-1].p_hat - ref.p_hat
        shrank = last_gap < first_gap
        report.verdicts.append(Verdict(
            "gap(k_last) < gap(k_first)",
            "ordered" if shrank else "inverted", "simulation",
            f"first gap {first_gap:.5f}, last gap {last_gap:.5f}"))
    return report


def probe_pair(plan: StudyPlan) -> tuple[LatticeSpec, LatticeSpec, int]:
    """Base and incremented scale vectors plus a window extent that is
    periodic-compatible with both."""
    spec_a = plan.spec()
    spec_b = LatticeSpec(plan.d, tuple(x + 1 for x in plan.k))
    step = math.lcm(spec_a.period, spec_b.period)
    window = max(plan.window, 3 * step)
    window = ((window + step - 1) // step) * step
    return spec_a, spec_b, window


def run_conjecture_probe(plan: StudyPlan) -> EstimateReport:
    """Reach curves for the scale vector and its +1 increment on one grid,
    with per-point 95% verdicts.  A report, not a proof: the table states
    consistency or tension at the achieved power, nothing more."""
    if plan.kind != "conjecture":
        raise ValueError(f"plan kind {plan.kind!r} is not conjecture")
    spec_a, spec_b, window = probe_pair(plan)
    grid = plan.grid()
    if len(grid) < 2:
        raise ValueError("conjecture probe needs at least two grid points")
    radius = min(plan.radius, window // 2)
    report = EstimateReport(study="conjecture", plan=plan)
    periodic = plan.boundary == "periodic"
    curves = {}
    for tag, spec in (("a", spec_a), ("b", spec_b)):
        view = GraphView.build(DECORATED, spec, window, periodic=periodic)
        micro = reach_ladder(view, (radius,), plan.runs, plan.seed,
                             mode=plan.mode, threads=plan.threads)[0]
        curve = convolve(micro, grid)
        band = bootstrap_curve_band(micro, grid, plan.n_boot, plan.seed)
        label = f"g|k={spec.k_label()}"
        report.curves[label] = curve
        report.bands[label] = band
        curves[tag] = (curve, band)
    (curve_a, band_a), (curve_b, band_b) = curves["a"], curves["b"]
    for i, p in enumerate(grid):
        verdict = interval_verdict(band_a[0][i], band_a[1][i],
                                   band_b[0][i], band_b[1][i])
        report.points.append(
            f"{float(p)!r},{float(curve_a.Q[i])!r},{float(curve_a.stderr[i])!r},"
            f"{float(band_a[0][i])!r},{float(band_a[1][i])!r},"
            f"{float(curve_b.Q[i])!r},{float(curve_b.stderr[i])!r},"
            f"{float(band_b[0][i])!r},{float(band_b[1][i])!r},{verdict}"
        )
    inverted = sum(1 for row in report.points if row.endswith(",inverted"))
    report.notes.append(
        f"window={window} radius={radius}; {inverted}/{len(grid)} points show "
        f"the base curve above the incremented one beyond 95% bands"
    )
    return report


def run_theta_curves(plan: StudyPlan) -> EstimateReport:
    """Reach-curve family over a radius ladder for one graph family."""
    if plan.kind != "theta-curves":
        raise ValueError(f"plan kind {plan.kind!r} is not theta-curves")
    spec = plan.spec()
    radii = plan.radii or (plan.radius,)
    periodic = plan.boundary == "periodic"
    view = GraphView.build(plan.graph, spec, plan.window, periodic=periodic)
    grid = plan.grid()
    curves = estimate_theta(view, grid, tuple(radii), plan.runs, plan.seed,
                            mode=plan.mode, threads=plan.threads)
    report = EstimateReport(study="theta-curves", plan=plan)
    for curve in curves:
        report.curves[f"{plan.graph}|{curve.event}"] = curve
    return report


RUNNERS = {
    "sandwich": run_sandwich,
    "limit-trend": run_limit_trend,
    "conjecture": run_conjecture_probe,
    "theta-curves": run_theta_curves,
}


def run_study(plan: StudyPlan) -> EstimateReport:
    return RUNNERS[plan.kind](plan)
