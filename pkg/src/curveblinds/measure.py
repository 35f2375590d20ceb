"""1-D Lebesgue measure engine: interval unions and Phi_alpha projections.

Projections of segments, blind sets, and fiber arcs all land on a vertical
line {alpha} x R; their images are finite unions of closed intervals, which
this module represents canonically (sorted, disjoint) and measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .curve import DOMAIN_TOL, CurveProfile
from .geometry import Point, Segment

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from .blinds import BlindSet

#: Gaps below this merge during canonicalization (suppresses float dust).
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class IntervalUnion:
    """A canonical finite union of disjoint closed intervals [lo, hi]."""

    intervals: tuple[tuple[float, float], ...]

    @property
    def measure(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def inflate(self, r: float) -> "IntervalUnion":
        """Thicken every interval by r on both sides (then re-canonicalize)."""
        if r < 0.0:
            raise ValueError(f"inflation radius must be >= 0, got {r!r}")
        return union_of([(lo - r, hi + r) for lo, hi in self.intervals])

    def erode(self, r: float) -> "IntervalUnion":
        """Shrink every interval by r on both sides, dropping emptied ones."""
        if r < 0.0:
            raise ValueError(f"erosion radius must be >= 0, got {r!r}")
        return union_of(
            [(lo + r, hi - r) for lo, hi in self.intervals if hi - lo > 2.0 * r]
        )

    def difference(self, other: "IntervalUnion") -> "IntervalUnion":
        """The closure of self minus other, as a canonical union."""
        pieces: list[tuple[float, float]] = []
        for lo, hi in self.intervals:
            cur = lo
            for olo, ohi in other.intervals:
                if ohi <= cur or olo >= hi:
                    continue
                if olo > cur:
                    pieces.append((cur, olo))
                cur = max(cur, ohi)
                if cur >= hi:
                    break
            if cur < hi:
                pieces.append((cur, hi))
        return union_of(pieces)

    def to_json(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.intervals]


EMPTY = IntervalUnion(())


def union_of(
    intervals: Iterable[Sequence[float]], merge_tol: float = MERGE_TOL
) -> IntervalUnion:
    """Canonicalize a collection of closed intervals (merge overlaps/dust)."""
    items = []
    for iv in intervals:
        lo, hi = float(iv[0]), float(iv[1])
        if hi < lo:
            raise ValueError(f"inverted interval [{lo!r}, {hi!r}]")
        items.append((lo, hi))
    if not items:
        return EMPTY
    items.sort()
    merged = [items[0]]
    for lo, hi in items[1:]:
        mlo, mhi = merged[-1]
        if lo <= mhi + merge_tol:
            if hi > mhi:
                merged[-1] = (mlo, hi)
        else:
            merged.append((lo, hi))
    return IntervalUnion(tuple(merged))


def union_from_arrays(
    los: np.ndarray, his: np.ndarray, merge_tol: float = MERGE_TOL
) -> IntervalUnion:
    """Vectorized canonicalization for large interval batches."""
    if los.size == 0:
        return EMPTY
    order = np.argsort(los, kind="stable")
    los = los[order]
    his = his[order]
    running = np.maximum.accumulate(his)
    # a new group starts where the interval does not touch the running hull
    new_group = np.empty(los.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = los[1:] > running[:-1] + merge_tol
    starts = np.flatnonzero(new_group)
    group_lo = los[starts]
    group_hi = np.maximum.reduceat(his, starts)
    return IntervalUnion(tuple(zip(group_lo.tolist(), group_hi.tolist())))


def measure(u: IntervalUnion) -> float:
    """Total length of the union (1-D Lebesgue measure)."""
    return u.measure


def contains(u: IntervalUnion, target: IntervalUnion, margin: float = 0.0) -> bool:
    """True iff every point of target is within margin of u's covered set."""
    if margin < 0.0:
        raise ValueError(f"margin must be >= 0, got {margin!r}")
    inflated = u.inflate(margin) if margin > 0.0 else u
    for lo, hi in target.intervals:
        ok = False
        for ulo, uhi in inflated.intervals:
            if ulo <= lo and hi <= uhi:
                ok = True
                break
            if ulo > lo:
                break
        if not ok:
            return False
    return True


# -- alpha parameter sets ---------------------------------------------------


@dataclass(frozen=True)
class AlphaSet:
    """A finite union of disjoint closed alpha-intervals with a sample grid."""

    components: tuple[tuple[float, float], ...]
    grid_step: float

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("alpha set needs at least one component")
        if not (math.isfinite(self.grid_step) and self.grid_step > 0.0):
            raise ValueError(f"grid step must be positive, got {self.grid_step!r}")
        prev_hi = -math.inf
        for lo, hi in self.components:
            if hi < lo:
                raise ValueError(f"inverted component [{lo!r}, {hi!r}]")
            if lo <= prev_hi:
                raise ValueError("alpha components must be sorted and disjoint")
            prev_hi = hi

    @classmethod
    def from_intervals(
        cls, components: Iterable[Sequence[float]], points_per_component: int = 200
    ) -> "AlphaSet":
        comps = tuple(sorted((float(c[0]), float(c[1])) for c in components))
        width = max((hi - lo for lo, hi in comps), default=0.0)
        n = max(2, points_per_component)
        step = width / (n - 1) if width > 0.0 else 1.0
        return cls(comps, step)

    @classmethod
    def interval(cls, lo: float, hi: float, points: int = 200) -> "AlphaSet":
        return cls.from_intervals([(lo, hi)], points)

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.components[0][0], self.components[-1][1])

    def contains_alpha(self, alpha: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= alpha <= hi + tol for lo, hi in self.components)

    def grid(self) -> np.ndarray:
        """All certification grid points, sorted; spacing <= grid_step."""
        pieces = []
        for lo, hi in self.components:
            if hi <= lo:
                pieces.append(np.array([lo]))
            else:
                n = int(math.ceil((hi - lo) / self.grid_step)) + 1
                pieces.append(np.linspace(lo, hi, n))
        return np.concatenate(pieces)


# -- projections ------------------------------------------------------------


@dataclass(frozen=True)
class FiberArc:
    """A sub-arc of the fiber y - Gamma, parametrized by t in [lo, hi]."""

    y: Point
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"empty fiber arc parameter range [{self.lo!r}, {self.hi!r}]")


def project_segment(curve: CurveProfile, alpha: float, seg: Segment) -> IntervalUnion:
    """Exact image interval of Phi_alpha over seg cap strip (empty if disjoint).

    Along the segment, Phi_alpha has monotone derivative in the parameter, so
    extrema sit at the clipped endpoints or at the unique interior critical
    point where f'(alpha - x1) equals the segment slope.
    """
    lo, hi = curve.strip(alpha)
    x1a, x2a = seg.a.x1, seg.a.x2
    dx1 = seg.b.x1 - x1a
    dx2 = seg.b.x2 - x2a

    if abs(dx1) <= DOMAIN_TOL:
        if not (lo - DOMAIN_TOL <= x1a <= hi + DOMAIN_TOL):
            return EMPTY
        base = curve.f(curve.clamp_t(alpha - x1a))
        v0, v1 = x2a + base, x2a + dx2 + base
        return union_of([(min(v0, v1), max(v0, v1))])

    # parameter range [t0, t1] in [0, 1] with x1(t) inside the strip
    if dx1 > 0.0:
        t0 = (lo - x1a) / dx1
        t1 = (hi - x1a) / dx1
    else:
        t0 = (hi - x1a) / dx1
        t1 = (lo - x1a) / dx1
    t0 = max(0.0, t0)
    t1 = min(1.0, t1)
    if t0 > t1:
        return EMPTY

    def value(t: float) -> float:
        x1 = x1a + t * dx1
        return x2a + t * dx2 + curve.f(curve.clamp_t(alpha - x1))

    candidates = [value(t0), value(t1)]
    slope = dx2 / dx1
    dlo, dhi = curve.df_range()
    if dlo - 1e-9 <= slope <= dhi + 1e-9:
        tc_curve = curve.df_inv(slope)
        tc = (alpha - tc_curve - x1a) / dx1
        if t0 < tc < t1:
            candidates.append(value(tc))
    return union_of([(min(candidates), max(candidates))])


def project_fiber_arc(curve: CurveProfile, alpha: float, arc: FiberArc) -> IntervalUnion:
    """Image of Phi_alpha over the fiber arc clipped to the strip.

    Along the fiber, Phi_alpha(t) = y2 - f(t) + f(t + (alpha - y1)); its
    derivative f'(t + s) - f'(t) has a fixed sign (f' strictly monotone), so
    the image endpoints sit at the extreme admissible parameters.
    """
    s = alpha - arc.y.x1
    # strip constraint: x1 = y1 - t in [alpha - b, alpha - a]  <=>  t in [a - s, b - s]
    t0 = max(arc.lo, curve.a - s, curve.a)
    t1 = min(arc.hi, curve.b - s, curve.b)
    if t0 > t1 + DOMAIN_TOL:
        return EMPTY
    t1 = max(t0, t1)

    def value(t: float) -> float:
        return arc.y.x2 - curve.f(curve.clamp_t(t)) + curve.f(curve.clamp_t(t + s))

    v0, v1 = value(t0), value(t1)
    return union_of([(min(v0, v1), max(v0, v1))])


def _project_coords_fast(
    curve: CurveProfile, alpha: float, coords: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized per-segment image intervals for an (n, 4) coordinate array."""
    ax, ay, bx, by = coords[:, 0], coords[:, 1], coords[:, 2], coords[:, 3]
    lo, hi = curve.strip(alpha)
    dx1 = bx - ax
    dx2 = by - ay

    vertical = np.abs(dx1) <= DOMAIN_TOL
    safe_dx1 = np.where(vertical, 1.0, dx1)
    bounds = np.stack([(lo - ax) / safe_dx1, (hi - ax) / safe_dx1])
    t0_raw = np.min(bounds, axis=0)
    t1_raw = np.max(bounds, axis=0)
    # validity from the unclipped window: the strip-parameter range must meet
    # [0, 1], otherwise clipping would fabricate a spurious endpoint touch
    t0 = np.clip(t0_raw, 0.0, 1.0)
    t1 = np.clip(t1_raw, 0.0, 1.0)
    # vertical segments: keep full parameter range, validity decided below
    t0 = np.where(vertical, 0.0, t0)
    t1 = np.where(vertical, 1.0, t1)
    valid = np.where(
        vertical,
        (ax >= lo - DOMAIN_TOL) & (ax <= hi + DOMAIN_TOL),
        (t1_raw >= 0.0) & (t0_raw <= 1.0),
    )

    def value(t: np.ndarray) -> np.ndarray:
        x1 = ax + t * dx1
        tt = np.clip(alpha - x1, curve.a, curve.b)
        return ay + t * dx2 + curve.f(tt)

    v0 = value(t0)
    v1 = value(t1)
    los = np.minimum(v0, v1)
    his = np.maximum(v0, v1)

    # interior critical points where f'(alpha - x1(t)) equals the slope
    dlo, dhi = curve.df_range()
    slope = dx2 / safe_dx1
    has_crit = (~vertical) & valid & (slope >= dlo - 1e-9) & (slope <= dhi + 1e-9)
    if np.any(has_crit):
        tc_curve = curve.df_inv_array(slope[has_crit])
        tc = (alpha - tc_curve - ax[has_crit]) / dx1[has_crit]
        inside = (tc > t0[has_crit]) & (tc < t1[has_crit])
        if np.any(inside):
            idx = np.flatnonzero(has_crit)[inside]
            t = tc[inside]
            x1 = ax[idx] + t * dx1[idx]
            vc = ay[idx] + t * dx2[idx] + curve.f(np.clip(alpha - x1, curve.a, curve.b))
            los[idx] = np.minimum(los[idx], vc)
            his[idx] = np.maximum(his[idx], vc)
    return los[valid], his[valid]


def project_blinds(curve: CurveProfile, alpha: float, blinds: "BlindSet") -> IntervalUnion:
    """Canonical union of project_segment over all members of a blind set."""
    coords = blinds.coords
    if curve.supports_arrays:
        los, his = _project_coords_fast(curve, alpha, coords)
        return union_from_arrays(los, his)
    pieces = []
    for seg in blinds.segments:
        u = project_segment(curve, alpha, seg)
        pieces.extend(u.intervals)
    return union_of(pieces)
