"""Minimal SVG curve plots with byte-level determinism.

Hand-rolled on purpose: the reproducibility contract promises identical bytes
for identical reports, which rules out plotting stacks that embed
timestamps, library versions, or hashed element ids.  Curves render as
polylines with optional confidence bands; vertical markers carry labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fileio import atomic_write_text

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 36, 44
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Series:
    x: list[float]
    y: list[float]
    lo: list[float] = field(default_factory=list)
    hi: list[float] = field(default_factory=list)
    label: str = ""


@dataclass
class VLine:
    x: float
    label: str = ""


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def render(path: str, series: list[Series], vlines: list[VLine] | None = None,
           title: str = "", xlabel: str = "p", ylabel: str = "Q") -> None:
    """Write a self-contained SVG; identical inputs yield identical bytes."""
    vlines = vlines or []
    xs = [v for s in series for v in s.x] + [v.x for v in vlines]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    y0, y1 = 0.0, 1.0

    def px(x: float) -> float:
        return MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R)

    def py(y: float) -> float:
        return HEIGHT - MARGIN_B - (y - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH // 2}" y="20" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">{title}</text>',
    ]
    for tx in _ticks(x0, x1):
        parts.append(
            f'<line x1="{_fmt(px(tx))}" y1="{_fmt(py(y0))}" x2="{_fmt(px(tx))}" '
            f'y2="{_fmt(py(y0) + 4)}" stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px(tx))}" y="{_fmt(py(y0) + 18)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{tx:.3g}</text>'
        )
    for ty in _ticks(y0, y1):
        parts.append(
            f'<line x1="{_fmt(px(x0) - 4)}" y1="{_fmt(py(ty))}" x2="{_fmt(px(x0))}" '
            f'y2="{_fmt(py(ty))}" stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px(x0) - 8)}" y="{_fmt(py(ty) + 4)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{ty:.3g}</text>'
        )
    parts.append(
        f'<rect x="{_fmt(px(x0))}" y="{_fmt(py(y1))}" '
        f'width="{_fmt(px(x1) - px(x0))}" height="{_fmt(py(y0) - py(y1))}" '
        f'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 8}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{HEIGHT // 2}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 16 {HEIGHT // 2})">{ylabel}</text>'
    )
    for idx, s in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        if s.lo and s.hi:
            band = [f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(s.x, s.lo)]
            band += [f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(reversed(s.x), reversed(s.hi))]
            parts.append(
                f'<polygon points="{" ".join(band)}" fill="{color}" '
                f'fill-opacity="0.18" stroke="none"/>'
            )
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(s.x, s.y))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        if s.label:
            ly = MARGIN_T + 16 * idx
            parts.append(
                f'<line x1="{MARGIN_L + 8}" y1="{ly}" x2="{MARGIN_L + 28}" y2="{ly}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{MARGIN_L + 34}" y="{ly + 4}" font-family="sans-serif" '
                f'font-size="11">{s.label}</text>'
            )
    for idx, v in enumerate(vlines):
        color = PALETTE[idx % len(PALETTE)]
        parts.append(
            f'<line x1="{_fmt(px(v.x))}" y1="{_fmt(py(y1))}" x2="{_fmt(px(v.x))}" '
            f'y2="{_fmt(py(y0))}" stroke="{color}" stroke-width="1" '
            f'stroke-dasharray="5,3"/>'
        )
        if v.label:
            parts.append(
                f'<text x="{_fmt(px(v.x) + 3)}" y="{MARGIN_T + 12 + 13 * idx}" '
                f'font-family="sans-serif" font-size="10" fill="{color}">{v.label}</text>'
            )
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")
