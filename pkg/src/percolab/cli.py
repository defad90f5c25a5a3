"""Command-line interface.

Subcommands: verify (structural checks), theta (reach curves), pc (threshold
by curve crossing), sandwich / limit / conjecture (full studies).  Exit
status: 0 on success, 1 when any structural verification fails, 2 on usage
errors.  Seeds default to a fixed constant so reruns reproduce every byte;
pass --seed to change the stream, --threads only changes wall time.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .engine import (
    DEFAULT_SEED,
    WrapEvent,
    check_coupling,
    estimate_pc,
    estimate_theta,
    write_curves_csv,
)
from .experiments import (
    SUMMARY_HEADER,
    EstimateReport,
    StudyPlan,
    parse_plan_file,
    plan_from_mapping,
    run_study,
)
from .fileio import atomic_write_text
from .lattice import FAMILIES, GraphView, LatticeSpec
from .maps import check_isomorphism, check_lattice, check_quotient
from .svgplot import Series, VLine, render


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",")) if text else ()


def _add_common(sp: argparse.ArgumentParser):
    sp.add_argument("--seed", type=int, default=None, help="master seed (fixed default)")
    sp.add_argument("--threads", type=int, default=None, help="worker threads")
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--svg", action="store_true", help="also write an SVG plot")
    sp.add_argument("--bond", action="store_true", help="bond occupation instead of site")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="percolab",
        description="Long-range percolation laboratory: structure checks and "
                    "Monte Carlo threshold studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="exhaustive structural verification")
    sp.add_argument("--d", "--dim", dest="d", type=int, required=True)
    sp.add_argument("--k", default="", help="comma list of scale factors")
    sp.add_argument("--window", type=int, required=True,
                    help="window extent (multiple of the coarsest bond length)")
    sp.add_argument("--samples", type=int, default=100_000,
                    help="sampled vertices/edges for the quotient checks")
    sp.add_argument("--configs", type=int, default=10_000,
                    help="sampled configurations for the coupling checks")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out", default=None, help="optional report file")

    sp = sub.add_parser("theta", help="origin-reach curves over a radius ladder")
    sp.add_argument("--graph", choices=FAMILIES, default="g")
    sp.add_argument("--d", "--dim", dest="d", type=int, required=True)
    sp.add_argument("--k", default="")
    sp.add_argument("--window", type=int, required=True)
    sp.add_argument("--boundary", choices=("periodic", "free"), default="periodic")
    sp.add_argument("--radius", default="8,16,32", help="comma ladder of radii")
    sp.add_argument("--p-grid", default="0.0:1.0:0.01", help="start:stop:step")
    sp.add_argument("--runs", type=int, default=10_000)
    _add_common(sp)

    sp = sub.add_parser("pc", help="threshold from two-size curve crossing")
    sp.add_argument("--graph", choices=FAMILIES, default="zd")
    sp.add_argument("--d", "--dim", dest="d", type=int, required=True)
    sp.add_argument("--k", default="")
    sp.add_argument("--sizes", required=True, help="two linear sizes, e.g. 64,128")
    sp.add_argument("--runs", type=int, default=10_000)
    sp.add_argument("--n-boot", type=int, default=2000)
    _add_common(sp)

    for kind, name in (("sandwich", "sandwich"), ("limit-trend", "limit"),
                       ("conjecture", "conjecture")):
        sp = sub.add_parser(name, help=f"{kind} study")
        sp.add_argument("--plan", default=None, help="flat key=value plan file")
        sp.add_argument("--d", "--dim", dest="d", type=int, default=None)
        if kind == "limit-trend":
            sp.add_argument("--k-ladder", dest="k_ladder", default=None,
                            help="comma ladder of single scale factors")
        else:
            sp.add_argument("--k", default=None)
        sp.add_argument("--sizes", default=None)
        sp.add_argument("--slab-sizes", dest="slab_sizes", default=None)
        sp.add_argument("--hyper-sizes", dest="hyper_sizes", default=None)
        sp.add_argument("--window", type=int, default=None)
        sp.add_argument("--radius", type=int, default=None)
        sp.add_argument("--p-grid", dest="p_grid", default=None)
        sp.add_argument("--runs", type=int, default=None)
        sp.add_argument("--n-boot", dest="n_boot", type=int, default=None)
        sp.add_argument("--boundary", choices=("periodic", "free"), default=None)
        _add_common(sp)
        sp.set_defaults(kind=kind)
    return parser


def _grid_of(text: str) -> np.ndarray:
    start, stop, step = (float(x) for x in text.split(":"))
    n = int(np.floor((stop - start) / step + 1.5))
    return np.round(start + step * np.arange(n), 12)


def cmd_verify(args) -> int:
    spec = LatticeSpec(args.d, _ints(args.k))
    if args.window % spec.period:
        print(f"error: --window {args.window} must be a multiple of {spec.period}",
              file=sys.stderr)
        return 2
    report = check_lattice(spec, min(args.window, 4 * spec.period))
    report.extend(check_isomorphism(spec, args.window))
    periods = max(2, args.window // spec.period)
    report.extend(check_quotient(spec, periods, args.samples, args.seed))
    report.extend(check_coupling(spec, args.window, args.configs, args.seed))
    text = report.text()
    print(text, end="")
    if args.out:
        atomic_write_text(args.out, text)
    return 0 if report.passed else 1


def cmd_theta(args) -> int:
    spec = LatticeSpec(args.d, _ints(args.k))
    view = GraphView.build(args.graph, spec, args.window,
                           periodic=args.boundary == "periodic")
    radii = _ints(args.radius)
    mode = "bond" if args.bond else "site"
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    curves = estimate_theta(view, _grid_of(args.p_grid), radii, args.runs, seed,
                            mode=mode, threads=args.threads or 1)
    out = args.out or "out"
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"theta_{args.graph}_w{args.window}.csv")
    write_curves_csv(path, curves)
    print(f"wrote {path}")
    if args.svg:
        svg_path = os.path.join(out, f"theta_{args.graph}_w{args.window}.svg")
        series = [Series(x=[float(p) for p in c.p], y=[float(q) for q in c.Q],
                         label=c.event) for c in curves]
        render(svg_path, series, title=f"reach curves {args.graph}")
        print(f"wrote {svg_path}")
    return 0


def cmd_pc(args) -> int:
    spec = LatticeSpec(args.d, _ints(args.k))
    sizes = _ints(args.sizes)
    if len(sizes) != 2:
        print("error: --sizes needs exactly two comma-separated extents",
              file=sys.stderr)
        return 2
    mode = "bond" if args.bond else "site"
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    small = GraphView.build(args.graph, spec, sizes[0], periodic=True)
    large = GraphView.build(args.graph, spec, sizes[1], periodic=True)
    est = estimate_pc(small, large, WrapEvent(), args.runs, seed, mode=mode,
                      threads=args.threads or 1, n_boot=args.n_boot)
    out = args.out or "out"
    os.makedirs(out, exist_ok=True)
    label = f"{args.graph}@{sizes[0]}x{sizes[1]}"
    curve_path = os.path.join(out, f"curves_pc_{args.graph}_{sizes[0]}x{sizes[1]}.csv")
    write_curves_csv(curve_path, [est.curve_small, est.curve_large])

    def fmt(x):
        return "" if x is None else repr(float(x))

    row = (f"pc,pc:{label},{args.graph},{args.d},{spec.k_label()},"
           f"{sizes[0]}x{sizes[1]},{est.curve_small.event},{mode},{args.runs},"
           f"{seed},{fmt(est.p_hat)},{fmt(est.ci_low)},{fmt(est.ci_high)},"
           f"{'crossed' if est.crossed else 'no-crossing'},{est.reason}")
    est_path = os.path.join(out, f"estimate_pc_{args.graph}_{sizes[0]}x{sizes[1]}.csv")
    atomic_write_text(est_path, "\n".join([SUMMARY_HEADER, row]) + "\n")
    if est.crossed:
        ci = (f" CI95 [{est.ci_low:.5f}, {est.ci_high:.5f}]"
              if est.ci_low is not None else f" ({est.reason})")
        print(f"pc({label}) = {est.p_hat:.5f}{ci}")
    else:
        print(f"pc({label}): no crossing ({est.reason})")
    print(f"wrote {curve_path}")
    print(f"wrote {est_path}")
    if args.svg:
        svg_path = os.path.join(out, f"pc_{args.graph}_{sizes[0]}x{sizes[1]}.svg")
        series = [Series(x=[float(p) for p in c.p], y=[float(q) for q in c.Q],
                         label=f"L={c.size}")
                  for c in (est.curve_small, est.curve_large)]
        vlines = ([VLine(est.p_hat, f"pc={est.p_hat:.4f}")]
                  if est.crossed and est.p_hat is not None else [])
        render(svg_path, series, vlines, title=f"crossing {label}")
        print(f"wrote {svg_path}")
    return 0


_FLAG_KEYS = ("d", "k", "k_ladder", "sizes", "slab_sizes", "hyper_sizes",
              "window", "radius", "p_grid", "runs", "seed", "threads", "n_boot",
              "boundary", "out")


def cmd_study(args) -> int:
    raw: dict[str, str] = {}
    if args.plan:
        raw.update(parse_plan_file(args.plan))
    raw["kind"] = args.kind  # the subcommand decides the study
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw["out_dir" if key == "out" else key] = str(value)
    if args.svg:
        raw["svg"] = "1"
    if args.bond:
        raw["mode"] = "bond"
    plan = plan_from_mapping(raw)
    report = run_study(plan)
    paths = report.write()
    for verdict in report.verdicts:
        print(f"{verdict.label}: {verdict.verdict} [{verdict.backed_by}] {verdict.detail}")
    for label, est in report.thresholds.items():
        if est.crossed:
            ci = (f" [{est.ci_low:.5f}, {est.ci_high:.5f}]"
                  if est.ci_low is not None else "")
            print(f"pc({label}) = {est.p_hat:.5f}{ci}")
        else:
            print(f"pc({label}): no crossing ({est.reason})")
    for path in paths:
        print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "theta":
            return cmd_theta(args)
        if args.command == "pc":
            return cmd_pc(args)
        return cmd_study(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
