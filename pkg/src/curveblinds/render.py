"""Deterministic SVG rendering of fiber arcs, blind sets, and strips.

No plotting dependency: the figure is assembled from SVG primitives with
fixed formatting so identical inputs produce byte-identical output.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .blinds import BlindSet
from .curve import CurveProfile, fiber_point
from .measure import FiberArc

_WIDTH = 800
_HEIGHT = 600
_MARGIN = 40
_STAGE_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd")


def _fmt(value: float) -> str:
    return f"{value:.3f}"


class _Frame:
    """Affine map from model coordinates to SVG pixel coordinates."""

    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        pad_x = 0.05 * (x_hi - x_lo) or 1.0
        pad_y = 0.05 * (y_hi - y_lo) or 1.0
        x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
        y_lo, y_hi = y_lo - pad_y, y_hi + pad_y
        span = max(x_hi - x_lo, y_hi - y_lo)
        cx, cy = (x_lo + x_hi) / 2.0, (y_lo + y_hi) / 2.0
        self.x_lo, self.x_hi = cx - span / 2.0, cx + span / 2.0
        self.y_lo, self.y_hi = cy - span / 2.0, cy + span / 2.0
        self.scale = (_WIDTH - 2 * _MARGIN) / span

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        px = _MARGIN + (x - self.x_lo) * self.scale
        py = _HEIGHT - _MARGIN - (y - self.y_lo) * self.scale
        return px, py


def _polyline(frame: _Frame, xs, ys, color: str, width: float, dash: str = "") -> str:
    pts = " ".join(
        f"{_fmt(px)},{_fmt(py)}" for px, py in (frame.to_px(x, y) for x, y in zip(xs, ys))
    )
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline points="{pts}" fill="none" stroke="{color}" '
        f'stroke-width="{_fmt(width)}"{dash_attr}/>'
    )


def render_svg(
    curve: CurveProfile,
    blinds: BlindSet,
    arc: Optional[FiberArc] = None,
    alpha: Optional[float] = None,
    title: str = "",
) -> str:
    """Render blinds (and optionally the fiber arc and one strip) as SVG text."""
    coords = blinds.coords
    xs = [coords[:, 0].min(), coords[:, 0].max(), coords[:, 2].min(), coords[:, 2].max()]
    ys = [coords[:, 1].min(), coords[:, 1].max(), coords[:, 3].min(), coords[:, 3].max()]
    arc_pts = None
    if arc is not None:
        ts = np.linspace(arc.lo, arc.hi, 400)
        arc_pts = [fiber_point(curve, arc.y, float(t)) for t in ts]
        xs += [p.x1 for p in arc_pts]
        ys += [p.x2 for p in arc_pts]
    frame = _Frame(min(xs), max(xs), min(ys), max(ys))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_MARGIN}" y="24" font-family="monospace" font-size="16">'
            f"{title}</text>"
        )
    if alpha is not None:
        # strip boundaries of Phi_alpha's domain: x1 = alpha - b and alpha - a
        for x_edge in (alpha - curve.b, alpha - curve.a):
            parts.append(
                _polyline(
                    frame,
                    [x_edge, x_edge],
                    [frame.y_lo, frame.y_hi],
                    "#999999",
                    1.0,
                    dash="6,4",
                )
            )
    if arc_pts is not None:
        parts.append(
            _polyline(
                frame, [p.x1 for p in arc_pts], [p.x2 for p in arc_pts], "#000000", 1.6
            )
        )
    stages = blinds.meta.get("stage_of_piece")
    for i in range(len(coords)):
        stage = 0
        if stages is not None and i < len(stages):
            stage = int(stages[i]) % len(_STAGE_COLORS)
        elif blinds.provenance is not None and i < len(blinds.provenance):
            stage = len(blinds.provenance[i]) % len(_STAGE_COLORS)
        x1a, x2a, x1b, x2b = (float(v) for v in coords[i])
        parts.append(
            _polyline(frame, [x1a, x1b], [x2a, x2b], _STAGE_COLORS[stage], 0.9)
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
