"""CSV emission and a dependency-free SVG line chart for selection curves."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .harness import RunResult, SelectionCurve

CURVE_COLUMNS = ("t", "arm", "p_hat", "ci_lo", "ci_hi", "cum_share")


def _g(x: float) -> str:
    return f"{float(x):.9g}"


def curve_rows(curve: SelectionCurve) -> list[tuple]:
    rows = []
    for i, t in enumerate(curve.checkpoints):
        for a in range(curve.n_arms):
            rows.append((int(t), a, _g(curve.p_hat[i, a]), _g(curve.ci_lo[i, a]), _g(curve.ci_hi[i, a]), _g(curve.cum_share[i, a])))
    return rows


def emit_csv(curve: SelectionCurve, path) -> None:
    """One row per (checkpoint, arm), sorted by ``(t, arm)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        w.writerows(curve_rows(curve))


def emit_runs_csv(results: Sequence[RunResult], path) -> None:
    """Per-run checkpoint snapshots: chosen arm, cumulative reward and pull counts."""
    k = results[0].counts.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", "t", "chosen", "cum_reward"] + [f"n_{a}" for a in range(k)])
        for r in results:
            for i, t in enumerate(r.checkpoints):
                w.writerow([r.run_index, int(t), int(r.chosen[i]), _g(r.cum_reward[i])] + [int(n) for n in r.counts[i]])


def read_curve_csv(path) -> dict:
    """Parse a curves CSV back into ``{t: {arm: row}}`` with float fields."""
    out: dict = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            t, a = int(row["t"]), int(row["arm"])
            out.setdefault(t, {})[a] = {k: float(row[k]) for k in CURVE_COLUMNS[2:]}
    return out


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


@dataclass(frozen=True)
class PlotStyle:
    width: int = 640
    height: int = 400
    margin_left: int = 60
    margin_right: int = 150
    margin_top: int = 40
    margin_bottom: int = 50
    band_opacity: float = 0.2
    line_width: float = 2.0
    colors: tuple = PALETTE
    title: str = ""


def render_svg(curve: SelectionCurve, style: PlotStyle | None = None) -> str:
    """Selection probability against log-scaled time, one line and CI band per arm.

    Only the per-arm lines and bands are ``<path>`` elements; axes, ticks and
    legend use other primitives.
    """
    if len(curve.checkpoints) == 0:
        raise ValueError("curve has no checkpoints")
    style = style or PlotStyle()
    title = style.title or curve.label or "Selection probability"
    x0, x1 = style.margin_left, style.width - style.margin_right
    y0, y1 = style.height - style.margin_bottom, style.margin_top

    lt = np.log10(np.asarray(curve.checkpoints, dtype=float))
    lo_dec = math.floor(lt.min())
    hi_dec = max(math.ceil(lt.max()), lo_dec + 1)

    def sx(t):
        return x0 + (math.log10(t) - lo_dec) / (hi_dec - lo_dec) * (x1 - x0)

    def sy(p):
        return y0 + p * (y1 - y0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{style.width}" height="{style.height}" fill="white"/>',
        f'<text x="{(x0 + x1) / 2:.1f}" y="{style.margin_top / 2 + 6:.1f}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for d in range(lo_dec, hi_dec + 1):
        x = sx(10.0**d)
        parts.append(f'<line x1="{x:.1f}" y1="{y0}" x2="{x:.1f}" y2="{y0 + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{y0 + 18}" text-anchor="middle">10<tspan dy="-5" font-size="9">{d}</tspan></text>')
    for p in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(p)
        parts.append(f'<line x1="{x0 - 5}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{y + 4:.1f}" text-anchor="end">{p:g}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{style.height - 12}" text-anchor="middle">t</text>')
    parts.append(
        f'<text x="16" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">P[a_t = a]</text>'
    )

    xs = [sx(t) for t in curve.checkpoints]
    names = curve.arm_names or tuple(f"arm {a}" for a in range(curve.n_arms))
    for a in range(curve.n_arms):
        color = style.colors[a % len(style.colors)]
        upper = [f"{x:.2f},{sy(v):.2f}" for x, v in zip(xs, curve.ci_hi[:, a])]
        lower = [f"{x:.2f},{sy(v):.2f}" for x, v in zip(reversed(xs), reversed(curve.ci_lo[:, a]))]
        parts.append(
            f'<path class="band" d="M{" L".join(upper + lower)} Z" fill="{color}" '
            f'fill-opacity="{style.band_opacity}" stroke="none"/>'
        )
    for a in range(curve.n_arms):
        color = style.colors[a % len(style.colors)]
        pts = [f"{x:.2f},{sy(v):.2f}" for x, v in zip(xs, curve.p_hat[:, a])]
        parts.append(
            f'<path class="line" d="M{" L".join(pts)}" fill="none" stroke="{color}" '
            f'stroke-width="{style.line_width}"/>'
        )
    lx = x1 + 15
    for a, name in enumerate(names):
        color = style.colors[a % len(style.colors)]
        ly = style.margin_top + 10 + 20 * a
        parts.append(f'<rect x="{lx}" y="{ly - 6}" width="14" height="4" fill="{color}"/>')
        parts.append(f'<text x="{lx + 20}" y="{ly}">{escape(str(name))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
