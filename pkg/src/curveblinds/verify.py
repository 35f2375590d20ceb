"""Certification harness: covering, smallness, gradient and rotation checks.

Grid certificates come with a Lipschitz-in-alpha padding: since
d(Phi_alpha)/d(alpha) = f'(alpha - x1) is bounded by df_bound, endpoint
motion between grid points is controlled, which extends per-grid-point
passes to closed-interval certificates when enough headroom is left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .blinds import BlindSet, rotate
from .curve import CurveProfile, eval_phi, grad_phi
from .geometry import Point, Segment
from .measure import (
    AlphaSet,
    FiberArc,
    IntervalUnion,
    contains,
    project_blinds,
    project_fiber_arc,
    project_segment,
)
from .projline import dist, normalize

Target = Union[Segment, FiberArc]


@dataclass
class PerAlpha:
    alpha: float
    covered: Optional[bool]
    deficit: float
    projected_measure: float

    def to_json_dict(self) -> dict:
        out = {
            "alpha": self.alpha,
            "deficit": self.deficit,
            "projected_measure": self.projected_measure,
        }
        if self.covered is not None:
            out["covered"] = self.covered
        return out


@dataclass
class VerificationReport:
    scene_id: str
    kind: str  # "cover" | "small"
    passed: bool
    bound: float  # margin for cover reports, measure bound for small reports
    padding: float  # certified alpha-slack around each grid point (0 if none)
    worst_alpha: float
    worst_value: float
    per_alpha: list[PerAlpha] = field(default_factory=list)

    def summary_line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict} {self.kind} [{self.scene_id}]: worst "
            f"{self.worst_value:.6g} at alpha={self.worst_alpha:.6g} "
            f"(bound {self.bound:.3g}, padding {self.padding:.3g})"
        )

    def to_json_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "kind": self.kind,
            "pass": self.passed,
            "bound": self.bound,
            "padding": self.padding,
            "worst_alpha": self.worst_alpha,
            "worst_value": self.worst_value,
            "per_alpha": [pa.to_json_dict() for pa in self.per_alpha],
        }


def _project_target(curve: CurveProfile, alpha: float, target: Target) -> IntervalUnion:
    if isinstance(target, Segment):
        return project_segment(curve, alpha, target)
    return project_fiber_arc(curve, alpha, target)


def check_cover(
    curve: CurveProfile,
    blinds: BlindSet,
    target: Target,
    alphas: AlphaSet,
    margin: float = 1e-9,
    scene_id: str = "",
    shift: float = 0.0,
) -> VerificationReport:
    """Certify Phi_alpha(blinds) contains Phi_alpha(target) over the grid.

    With shift > 0 the per-grid-point test erodes the blind projection and
    inflates the target by shift, so a pass certifies covering on the whole
    closed interval when shift >= df_bound * (half the grid spacing): moving
    alpha by dalpha moves every projected point by at most df_bound * dalpha.
    """
    if margin < 0.0:
        raise ValueError(f"margin must be >= 0, got {margin!r}")
    if shift < 0.0:
        raise ValueError(f"shift must be >= 0, got {shift!r}")
    per_alpha: list[PerAlpha] = []
    worst = (-math.inf, math.nan)
    all_ok = True
    for alpha in alphas.grid():
        alpha = float(alpha)
        proj_e = project_blinds(curve, alpha, blinds)
        proj_t = _project_target(curve, alpha, target)
        if shift > 0.0:
            proj_e = proj_e.erode(shift)
            proj_t = proj_t.inflate(shift)
        ok = contains(proj_e, proj_t, margin)
        deficit = proj_t.difference(proj_e.inflate(margin)).measure if not ok else 0.0
        per_alpha.append(PerAlpha(alpha, ok, deficit, proj_e.measure))
        all_ok &= ok
        if deficit > worst[0]:
            worst = (deficit, alpha)
    if not all_ok:
        padding = 0.0
    elif shift > 0.0:
        half_step = alphas.grid_step / 2.0
        padding = half_step if shift >= curve.df_bound * half_step else 0.0
    else:
        padding = _cover_padding(curve, alphas, margin)
    return VerificationReport(
        scene_id=scene_id,
        kind="cover",
        passed=all_ok,
        bound=margin,
        padding=padding,
        worst_alpha=worst[1],
        worst_value=worst[0] if math.isfinite(worst[0]) else 0.0,
        per_alpha=per_alpha,
    )


def _cover_padding(curve: CurveProfile, alphas: AlphaSet, margin: float) -> float:
    """Alpha-slack certified by endpoint Lipschitz motion, if headroom allows."""
    half_step = alphas.grid_step / 2.0
    if half_step * curve.df_bound * 2.0 < margin:
        return half_step
    return 0.0


def check_small(
    curve: CurveProfile,
    blinds: BlindSet,
    alphas: AlphaSet,
    bound: float,
    scene_id: str = "",
    shift: float = 0.0,
) -> VerificationReport:
    """Certify per-alpha projected measure of the blinds stays below bound.

    With shift > 0 the per-grid-point measure is taken on the projection
    inflated by shift; since every projected point moves by at most
    df_bound * dalpha, a pass with shift >= df_bound * (half the grid
    spacing) bounds the measure on the whole closed interval.
    """
    if bound <= 0.0:
        raise ValueError(f"bound must be positive, got {bound!r}")
    if shift < 0.0:
        raise ValueError(f"shift must be >= 0, got {shift!r}")
    per_alpha: list[PerAlpha] = []
    worst = (-math.inf, math.nan)
    n_max = 0
    for alpha in alphas.grid():
        alpha = float(alpha)
        proj = project_blinds(curve, alpha, blinds)
        if shift > 0.0:
            proj = proj.inflate(shift)
        m = proj.measure
        per_alpha.append(PerAlpha(alpha, None, 0.0, m))
        n_max = max(n_max, len(proj.intervals))
        if m > worst[0]:
            worst = (m, alpha)
    passed = worst[0] < bound
    padding = 0.0
    if passed and shift > 0.0:
        half_step = alphas.grid_step / 2.0
        if shift >= curve.df_bound * half_step:
            padding = half_step
    elif passed and n_max > 0:
        # measure of an n-interval union moves by <= 2 n df_bound dalpha
        half_step = alphas.grid_step / 2.0
        if worst[0] + 2.0 * n_max * curve.df_bound * half_step < bound:
            padding = half_step
    return VerificationReport(
        scene_id=scene_id,
        kind="small",
        passed=passed,
        bound=bound,
        padding=padding,
        worst_alpha=worst[1],
        worst_value=worst[0],
        per_alpha=per_alpha,
    )


def gradient_check(
    curve: CurveProfile, samples: int = 1000, h: float = 1e-6, seed: int = 0
) -> float:
    """Max relative error of grad_phi against central differences of eval_phi."""
    if h <= 0.0:
        raise ValueError(f"step h must be positive, got {h!r}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    width = curve.b - curve.a
    for _ in range(samples):
        alpha = float(rng.uniform(-1.0, 1.0))
        # keep x1 strictly interior so both difference stencils stay in-strip
        t = float(rng.uniform(curve.a + 0.05 * width, curve.b - 0.05 * width))
        x1 = alpha - t
        x2 = float(rng.uniform(-1.0, 1.0))
        g1, g2 = grad_phi(curve, alpha, Point(x1, x2))
        d1 = (
            eval_phi(curve, alpha, Point(x1 + h, x2))
            - eval_phi(curve, alpha, Point(x1 - h, x2))
        ) / (2.0 * h)
        d2 = (
            eval_phi(curve, alpha, Point(x1, x2 + h))
            - eval_phi(curve, alpha, Point(x1, x2 - h))
        ) / (2.0 * h)
        scale = max(1.0, abs(g1), abs(g2))
        worst = max(worst, abs(d1 - g1) / scale, abs(d2 - g2) / scale)
    return worst


def law_of_sines_check(trials: int = 1000, seed: int = 0) -> float:
    """Max relative residual of |rotate(seg)| against the law-of-sines formula.

    Samples valid triples for both chiralities: angles pairwise at least
    0.05 rad apart so the rotation is well conditioned.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials!r}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        for sign in (1.0, -1.0):  # counterclockwise and clockwise configurations
            a = Point(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)))
            theta_seg = float(rng.uniform(0.0, math.pi))
            length = float(rng.uniform(0.1, 2.0))
            b = Point(
                a.x1 + length * math.cos(theta_seg),
                a.x2 + length * math.sin(theta_seg),
            )
            seg = Segment(a, b)
            gap_small = float(rng.uniform(0.05, 1.2))
            gap_cover = float(rng.uniform(gap_small + 0.05, gap_small + 1.4))
            theta_small = normalize(theta_seg + sign * gap_small)
            theta_cover = normalize(theta_seg + sign * gap_cover)
            result = rotate(seg, theta_small, theta_cover)
            expected = (
                math.sin(dist(seg.direction, theta_cover))
                / math.sin(dist(theta_small, theta_cover))
                * seg.length
            )
            worst = max(worst, abs(result.length - expected) / expected)
    return worst
