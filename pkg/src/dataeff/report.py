"""Plot emission without a plotting dependency: SVG for eyes, CSV for machines.

The chart mirrors the discrete/continuous pair: scattered (subset %, EM %)
observations, the fitted curve as a polyline sampled at 200 x-values, and a
dashed guide-line pair (horizontal at the EM target, vertical at the required
subset percent) per inverse query. Axes are fixed to [0,100] x [0,100]. All
numbers are formatted with fixed precision so output bytes are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .curve import CurveModel, evaluate, invert
from .errors import DataEffError, UnreachableTargetError

WIDTH, HEIGHT = 720, 520
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 62, 22, 30, 56
CURVE_SAMPLES = 200


@dataclass(frozen=True)
class ReportSpec:
    """What to draw: points, optional fitted curve, inverse queries, format."""

    points: tuple
    model: CurveModel | None = None
    queries: tuple = ()
    fmt: str = "both"  # "svg" | "csv" | "both"

    def __post_init__(self):
        if not self.points:
            raise DataEffError("report needs at least one point")
        if self.fmt not in ("svg", "csv", "both"):
            raise DataEffError(f"format must be svg, csv, or both, got {self.fmt!r}")
        for y in self.queries:
            if not 0.0 < y < 100.0:
                raise DataEffError(f"query targets must be inside (0, 100), got {y:g}")
        if self.queries and self.model is None:
            raise DataEffError("queries need a fitted curve model")


def _fx(x: float) -> float:
    return MARGIN_LEFT + x / 100.0 * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)


def _fy(y: float) -> float:
    return HEIGHT - MARGIN_BOTTOM - y / 100.0 * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)


def _curve_xs(model: CurveModel) -> list[float]:
    x_min = model.fit_domain[0]
    step = (100.0 - x_min) / (CURVE_SAMPLES - 1)
    return [x_min + i * step for i in range(CURVE_SAMPLES)]


def _resolve_queries(model: CurveModel, queries: tuple) -> list[tuple[float, float | None]]:
    """(target EM, required percent or None when it cannot be drawn)."""
    resolved = []
    for y in queries:
        try:
            answer = invert(model, y)
            resolved.append((y, None if answer.exceeds_full_data else answer.percent))
        except UnreachableTargetError:
            resolved.append((y, None))
    return resolved


def render_svg(spec: ReportSpec) -> str:
    """Standalone SVG document for the report."""
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    # grid and axes, ticks every 20 units
    for value in range(0, 101, 20):
        gx, gy = _fx(value), _fy(value)
        out.append(
            f'<line class="grid" x1="{gx:.2f}" y1="{_fy(0):.2f}" x2="{gx:.2f}" '
            f'y2="{_fy(100):.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<line class="grid" x1="{_fx(0):.2f}" y1="{gy:.2f}" x2="{_fx(100):.2f}" '
            f'y2="{gy:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text class="tick" x="{gx:.2f}" y="{_fy(0) + 18:.2f}" font-size="12" '
            f'text-anchor="middle">{value}</text>'
        )
        out.append(
            f'<text class="tick" x="{_fx(0) - 8:.2f}" y="{gy + 4:.2f}" font-size="12" '
            f'text-anchor="end">{value}</text>'
        )
    out.append(
        f'<line class="axis" x1="{_fx(0):.2f}" y1="{_fy(0):.2f}" x2="{_fx(100):.2f}" '
        f'y2="{_fy(0):.2f}" stroke="black" stroke-width="1.5"/>'
    )
    out.append(
        f'<line class="axis" x1="{_fx(0):.2f}" y1="{_fy(0):.2f}" x2="{_fx(0):.2f}" '
        f'y2="{_fy(100):.2f}" stroke="black" stroke-width="1.5"/>'
    )
    out.append(
        f'<text class="label" x="{(_fx(0) + _fx(100)) / 2:.2f}" y="{HEIGHT - 12}" '
        f'font-size="14" text-anchor="middle">target subset (%)</text>'
    )
    out.append(
        f'<text class="label" x="16" y="{(_fy(0) + _fy(100)) / 2:.2f}" font-size="14" '
        f'text-anchor="middle" transform="rotate(-90 16 {(_fy(0) + _fy(100)) / 2:.2f})">'
        "exact match (%)</text>"
    )

    if spec.model is not None:
        coords = " ".join(
            f"{_fx(x):.2f},{_fy(evaluate(spec.model, x, clamp=True)):.2f}"
            for x in _curve_xs(spec.model)
        )
        out.append(
            f'<polyline class="curve" points="{coords}" fill="none" '
            'stroke="#1f77b4" stroke-width="2"/>'
        )
        for y, x_required in _resolve_queries(spec.model, spec.queries):
            if x_required is None:
                out.append(f"<!-- query em={y:g}: not reachable within 100% of data -->")
                continue
            gx, gy = _fx(x_required), _fy(y)
            out.append(
                f'<line class="guide" x1="{_fx(0):.2f}" y1="{gy:.2f}" x2="{gx:.2f}" '
                f'y2="{gy:.2f}" stroke="#d62728" stroke-width="1.5" stroke-dasharray="5 4"/>'
            )
            out.append(
                f'<line class="guide" x1="{gx:.2f}" y1="{gy:.2f}" x2="{gx:.2f}" '
                f'y2="{_fy(0):.2f}" stroke="#d62728" stroke-width="1.5" stroke-dasharray="5 4"/>'
            )
            out.append(
                f'<text class="guide-label" x="{gx + 4:.2f}" y="{_fy(0) - 6:.2f}" '
                f'font-size="12" fill="#d62728">{x_required:.2f}%</text>'
            )

    for p in spec.points:
        out.append(
            f'<circle class="point" cx="{_fx(p.subset_percent):.2f}" '
            f'cy="{_fy(p.exact_match):.2f}" r="4" fill="#ff7f0e" '
            'stroke="#8c4a03" stroke-width="1"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_csv(spec: ReportSpec) -> str:
    """Raw series behind the chart: discrete points, curve samples, query answers."""
    lines = ["series,x,y"]
    for p in spec.points:
        lines.append(f"point,{p.subset_percent:.10g},{p.exact_match:.10g}")
    if spec.model is not None:
        for x in _curve_xs(spec.model):
            lines.append(f"curve,{x:.10g},{evaluate(spec.model, x, clamp=True):.10g}")
        for y, x_required in _resolve_queries(spec.model, spec.queries):
            lines.append(f"query,{'' if x_required is None else format(x_required, '.10g')},{y:.10g}")
    return "\n".join(lines) + "\n"


def write_report(spec: ReportSpec, out_prefix: str | Path) -> list[Path]:
    """Write <prefix>.svg and/or <prefix>.csv; returns the paths written."""
    out_prefix = Path(out_prefix)
    written = []
    if spec.fmt in ("svg", "both"):
        path = out_prefix.with_suffix(".svg")
        path.write_text(render_svg(spec), encoding="utf-8")
        written.append(path)
    if spec.fmt in ("csv", "both"):
        path = out_prefix.with_suffix(".csv")
        path.write_text(render_csv(spec), encoding="utf-8")
        written.append(path)
    return written
