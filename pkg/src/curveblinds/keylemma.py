"""The key-construction pipeline.

Given a fiber point y and a parameter subrange, the fiber arc gamma is
approximated by a tangent-line polygon chain; per chain segment, disjoint
direction bands for the cover and small alpha-sets are computed from a
compact neighborhood; a two-stage blind construction (one clockwise stage
toward the lower small band edge, then counterclockwise iterated blinds
toward the upper edge) produces a segment family that covers gamma's
projections over A_cover while projecting with small measure over A_small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blinds import (
    BlindSet,
    Caps,
    ConstructionError,
    DEFAULT_CAPS,
    auto_iter_vb,
    auto_vb_cover,
)
from .curve import CurveProfile, fiber_point
from .geometry import Point, Segment
from .measure import AlphaSet, FiberArc, contains, project_fiber_arc, union_of
from .measure import project_segment as _project_segment
from .projline import CCW, PI, Arc, Direction, dist, normalize
from .verify import VerificationReport, check_cover, check_small


class SeparationError(RuntimeError):
    """Cover and small direction sets could not be separated into bands."""

    def __init__(self, message: str, closest_pair: object = None):
        super().__init__(message)
        self.closest_pair = closest_pair


@dataclass(frozen=True)
class AngleBands:
    """Disjoint direction arcs enclosing the cover and small tangent sets.

    Counterclockwise cyclic order is cover_lo, cover_hi, small_lo, small_hi;
    the two closed arcs [cover_lo, cover_hi] and [small_lo, small_hi]
    (both counterclockwise) are separated by at least eps0.
    """

    cover_lo: Direction
    cover_hi: Direction
    small_lo: Direction
    small_hi: Direction
    eps0: float

    def __post_init__(self) -> None:
        if self.eps0 <= 0.0:
            raise ValueError(f"band separation must be positive, got {self.eps0!r}")

    @property
    def cover_arc(self) -> Arc:
        return Arc(self.cover_lo, self.cover_hi, CCW)

    @property
    def small_arc(self) -> Arc:
        return Arc(self.small_lo, self.small_hi, CCW)


@dataclass(frozen=True)
class PolyChain:
    """A tangent-line polygon chain approximating a fiber arc.

    Vertices p_0 ... p_N; segment i (from p_{i-1} to p_i) is tangent to the
    fiber arc at parameter tangency_params[i-1]; p_0 and p_N lie on the arc.
    """

    vertices: tuple[Point, ...]
    tangency_params: tuple[float, ...]
    source: FiberArc

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ValueError("chain needs at least two vertices")
        if len(self.tangency_params) != len(self.vertices) - 1:
            raise ValueError("need one tangency parameter per chain segment")

    def segments(self) -> list[Segment]:
        return [
            Segment(self.vertices[i], self.vertices[i + 1])
            for i in range(len(self.vertices) - 1)
        ]


@dataclass(frozen=True)
class CompactNbhd:
    """A compact region: a point cloud thickened by a radius."""

    points: np.ndarray  # (n, 2)
    radius: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
            raise ValueError("point cloud must be a nonempty (n, 2) array")
        object.__setattr__(self, "points", pts)
        if self.radius < 0.0:
            raise ValueError(f"radius must be >= 0, got {self.radius!r}")


# -- polygon approximation --------------------------------------------------


def _tangent_intersection(
    curve: CurveProfile, y: Point, t1: float, t2: float
) -> Point:
    """Intersection of the fiber tangent lines at parameters t1 and t2.

    The fiber is the graph x2 = y2 - f(y1 - x1) over x1, with slope
    f'(y1 - x1) = f'(t); tangent slopes differ since f' is injective.
    """
    q1 = fiber_point(curve, y, t1)
    q2 = fiber_point(curve, y, t2)
    s1 = curve.df(curve.clamp_t(t1))
    s2 = curve.df(curve.clamp_t(t2))
    x1 = (q2.x2 - q1.x2 + s1 * q1.x1 - s2 * q2.x1) / (s1 - s2)
    return Point(x1, q1.x2 + s1 * (x1 - q1.x1))


def _point_to_fiber_distance(
    curve: CurveProfile, arc: FiberArc, p: Point, samples: int = 512
) -> float:
    """Distance from p to the fiber arc via dense sampling + local refinement."""
    ts = np.linspace(arc.lo, arc.hi, samples)
    xs = arc.y.x1 - ts
    ys = arc.y.x2 - curve.f(np.clip(ts, curve.a, curve.b))
    d2 = (xs - p.x1) ** 2 + (ys - p.x2) ** 2
    i = int(np.argmin(d2))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, samples - 1)]
    # golden-section refinement of the squared distance on the bracket
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0

    def d2_at(t: float) -> float:
        q = fiber_point(curve, arc.y, t)
        return (q.x1 - p.x1) ** 2 + (q.x2 - p.x2) ** 2

    a, b = float(lo), float(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = d2_at(c), d2_at(d)
    while b - a > 1e-13:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = d2_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = d2_at(d)
    return math.sqrt(min(fc, fd))


def default_alpha_box(curve: CurveProfile, arc: FiberArc, points: int = 100) -> AlphaSet:
    """An alpha-grid spanning every alpha whose strip can meet the fiber arc."""
    lo = arc.y.x1 - arc.hi + curve.a - 0.1
    hi = arc.y.x1 - arc.lo + curve.b + 0.1
    return AlphaSet.interval(lo, hi, points)


def polygon_approx(
    curve: CurveProfile,
    y: Point,
    subrange: tuple[float, float],
    eps: float,
    delta: float,
    alpha_grid: Optional[AlphaSet] = None,
    n0: int = 2,
    n_max: int = 2**20,
) -> PolyChain:
    """Tangent-line polygon chain P with Phi_alpha(P) containing Phi_alpha(gamma).

    Doubles the partition count until every chain segment is shorter than
    eps, the chain lies within delta of the fiber arc, and the projection
    covering certifies on the test alpha-grid.
    """
    a1, b1 = float(subrange[0]), float(subrange[1])
    if not curve.a - 1e-12 <= a1 < b1 <= curve.b + 1e-12:
        raise ValueError(f"invalid subrange [{a1!r}, {b1!r}] within [{curve.a}, {curve.b}]")
    if eps <= 0.0 or delta <= 0.0:
        raise ValueError("eps and delta must be positive")
    arc = FiberArc(y, a1, b1)
    if alpha_grid is None:
        alpha_grid = default_alpha_box(curve, arc)
    alphas = alpha_grid.grid()

    n = max(2, n0)
    while n <= n_max:
        # n partition points t_1 .. t_n; interior vertices are tangent-line
        # intersections at consecutive partition points, so segment i is
        # tangent to the arc at t_i and the chain has n segments
        ts = np.linspace(a1, b1, n)
        vertices = [fiber_point(curve, y, a1)]
        for i in range(n - 1):
            vertices.append(
                _tangent_intersection(curve, y, float(ts[i]), float(ts[i + 1]))
            )
        vertices.append(fiber_point(curve, y, b1))
        chain = PolyChain(tuple(vertices), tuple(float(t) for t in ts), arc)
        if _polygon_ok(curve, chain, eps, delta, alphas):
            return chain
        n *= 2
    raise ConstructionError(
        f"polygon approximation exceeded partition cap {n_max}", stage="polygon"
    )


def _polygon_ok(
    curve: CurveProfile,
    chain: PolyChain,
    eps: float,
    delta: float,
    alphas: np.ndarray,
) -> bool:
    segs = chain.segments()
    if any(s.length >= eps for s in segs):
        return False
    for v in chain.vertices:
        if _point_to_fiber_distance(curve, chain.source, v) > delta:
            return False
    for alpha in alphas:
        alpha = float(alpha)
        target = project_fiber_arc(curve, alpha, chain.source)
        if target.is_empty:
            continue
        pieces = []
        for s in segs:
            pieces.extend(_project_segment(curve, alpha, s).intervals)
        if not contains(union_of(pieces), target, 1e-9):
            return False
    return True


# -- angle bands ------------------------------------------------------------


def compute_bands(
    curve: CurveProfile,
    nbhd: CompactNbhd,
    a_small: AlphaSet,
    a_cover: AlphaSet,
    slack: float = 1e-7,
) -> AngleBands:
    """Disjoint direction bands for a compact region over A_small / A_cover.

    Tangent directions theta_alpha(x) = atan(f'(alpha - x1)) over the region
    depend only on t = alpha - x1, and f' is monotone, so the exact direction
    range over (alpha-component) x (region) is attained at the endpoints of
    the corresponding t-window; the bands are those exact ranges plus a tiny
    safety slack.  The small band may wrap through the vertical direction
    when the small set straddles the cover set.
    """
    if len(a_cover.components) != 1:
        raise ValueError("A_cover must be a single interval")
    for clo, chi_ in a_cover.components:
        for slo, shi in a_small.components:
            if not (shi < clo or chi_ < slo):
                raise ValueError("A_small and A_cover must be disjoint")

    x1_lo = float(np.min(nbhd.points[:, 0])) - nbhd.radius
    x1_hi = float(np.max(nbhd.points[:, 0])) + nbhd.radius

    clo, chi_ = a_cover.bounds
    t_lo, t_hi = clo - x1_hi, chi_ - x1_lo
    if t_lo < curve.a or t_hi > curve.b:
        raise SeparationError(
            f"compact region leaves the strip over A_cover "
            f"(t-window [{t_lo:.3g}, {t_hi:.3g}] vs [{curve.a}, {curve.b}])"
        )
    cover_phis = np.array(
        [math.atan(curve.df(t_lo)), math.atan(curve.df(t_hi))]
    )
    small_vals = []
    for slo, shi in a_small.components:
        w_lo = max(slo - x1_hi, curve.a)
        w_hi = min(shi - x1_lo, curve.b)
        if w_lo <= w_hi:
            small_vals.append(math.atan(curve.df(w_lo)))
            small_vals.append(math.atan(curve.df(w_hi)))
    if not small_vals:
        raise SeparationError("no admissible directions over A_small")
    small_phis = np.array(small_vals)

    c_lo = float(np.min(cover_phis)) - slack
    c_hi = float(np.max(cover_phis)) + slack
    c_mid = 0.5 * (c_lo + c_hi)
    below = small_phis[small_phis < c_mid]
    above = small_phis[small_phis >= c_mid]

    if below.size and above.size:
        # small set straddles the cover band: enclose it the other way round,
        # through the vertical direction (the small arc wraps)
        s_lo = float(np.min(above)) - slack
        s_hi = float(np.max(below)) + slack
        gap_after_cover = s_lo - c_hi
        gap_after_small = c_lo - s_hi
    elif below.size:
        # small band entirely counterclockwise-before the cover band
        s_lo = float(np.min(below)) - slack
        s_hi = float(np.max(below)) + slack
        gap_after_small = c_lo - s_hi
        gap_after_cover = PI - (c_hi - s_lo)  # through the vertical direction
    else:
        s_lo = float(np.min(above)) - slack
        s_hi = float(np.max(above)) + slack
        gap_after_cover = s_lo - c_hi
        gap_after_small = PI - (s_hi - c_lo)
    eps0 = min(gap_after_cover, gap_after_small)
    if eps0 <= 0.0:
        raise SeparationError(
            f"inflated direction sets overlap (separation {eps0:.3g}); "
            "delta or grids too coarse",
            closest_pair=((c_lo, c_hi), (s_lo, s_hi)),
        )
    return AngleBands(
        cover_lo=normalize(c_lo),
        cover_hi=normalize(c_hi),
        small_lo=normalize(s_lo),
        small_hi=normalize(s_hi),
        eps0=eps0,
    )


# -- two-stage local construction ------------------------------------------


def local_construction(
    curve: CurveProfile,
    seg: Segment,
    bands: AngleBands,
    a_small: AlphaSet,
    a_cover: AlphaSet,
    eps: float,
    delta: float,
    caps: Caps = DEFAULT_CAPS,
) -> BlindSet:
    """Cover-and-shrink blinds for one short segment, per the angle bands.

    Step 1 rotates the segment clockwise into blades of direction small_lo
    (cover direction cover_hi), staying within delta/2; step 2 runs
    counterclockwise iterated blinds on every blade toward small_hi (cover
    direction cover_lo), staying within delta of the original segment.  The
    two stages' covering arcs intersect to the cover band.
    """
    if seg.length >= eps:
        raise ConstructionError(
            f"segment length {seg.length:.3g} must be below eps={eps:.3g}",
            stage="precondition",
        )
    if not bands.small_arc.contains_strictly(seg.direction, tol=1e-9):
        raise ConstructionError(
            f"segment direction {seg.direction} is not strictly inside the "
            f"small band [{bands.small_lo}, {bands.small_hi}]",
            stage="band membership",
        )
    # keep stage-1 blades below the stage-2 length precondition
    ratio = math.sin(dist(seg.direction, bands.cover_hi)) / math.sin(
        dist(bands.small_lo, bands.cover_hi)
    )
    n0 = max(1, math.ceil(seg.length * ratio / (0.9 * eps)))
    n1, stage1 = auto_vb_cover(
        curve,
        seg,
        bands.small_lo,
        bands.cover_hi,
        a_cover,
        n0=n0,
        n_max=caps.n_max,
        max_offset=delta / 2.0,
    )
    pieces = []
    counts = []
    for blade in stage1.segments:
        bs = auto_iter_vb(
            curve,
            blade,
            bands.small_hi,
            bands.cover_lo,
            eps,
            a_small=a_small,
            a_cover=a_cover,
            chirality=CCW,
            caps=caps,
            delta=delta / 2.0,
        )
        pieces.append(bs.coords)
        counts.append(len(bs))
    coords = np.concatenate(pieces)
    result = BlindSet(
        coords,
        provenance=None,
        meta={
            "kind": "local_construction",
            "stage1_n": n1,
            "stage2_counts": counts,
            "bands": {
                "cover_lo": bands.cover_lo.angle,
                "cover_hi": bands.cover_hi.angle,
                "small_lo": bands.small_lo.angle,
                "small_hi": bands.small_hi.angle,
                "eps0": bands.eps0,
            },
        },
    )
    return result


# -- end-to-end key construction -------------------------------------------


@dataclass
class KeyResult:
    """Output of key_construction: the blinds plus their certificates."""

    blinds: BlindSet
    chain: PolyChain
    cover_report: VerificationReport
    small_report: VerificationReport
    eps_used: float
    delta_used: float


def key_construction(
    curve: CurveProfile,
    y: Point,
    subrange: tuple[float, float],
    a_small: AlphaSet,
    a_cover: AlphaSet,
    eps: float,
    delta: float,
    caps: Caps = DEFAULT_CAPS,
    segment_points: int = 33,
    max_attempts: int = 6,
    scene_id: str = "",
) -> KeyResult:
    """A finite segment family covering gamma over A_cover, small over A_small.

    The internal working scale eps_c starts at the requested eps and is
    reduced (ratio estimated from the measured smallness overshoot) until the
    per-segment angle bands separate and the smallness certificate meets the
    user bound; delta shrinks alongside and so the closed neighborhood of
    gamma stays inside the strip interior over A_cover.
    """
    a1, b1 = float(subrange[0]), float(subrange[1])
    alpha0 = y.x1
    if not a_small.contains_alpha(alpha0, tol=1e-12):
        raise ValueError(f"alpha0={alpha0!r} must lie in A_small")
    if len(a_cover.components) != 1:
        raise ValueError("A_cover must be a single interval")
    amin, amax = a_cover.bounds
    x1_lo, x1_hi = y.x1 - b1, y.x1 - a1
    clearance = min(x1_lo - (amax - curve.b), (amin - curve.a) - x1_hi)
    if clearance <= 0.0:
        raise ValueError(
            f"fiber arc leaves the strip over A_cover (clearance {clearance:.3g})"
        )
    arc = FiberArc(y, a1, b1)
    eps_c = eps
    delta_eff = min(delta, 0.45 * clearance)
    last_error: Exception | None = None
    for _attempt in range(max_attempts):
        delta_c = min(delta_eff, eps_c)
        try:
            result = _key_attempt(
                curve, y, arc, a_small, a_cover, eps, eps_c, delta_c, caps,
                segment_points, scene_id,
            )
        except (SeparationError, ConstructionError) as exc:
            last_error = exc
            eps_c *= 0.5
            continue
        if result.cover_report.passed and result.small_report.passed:
            return result
        if result.small_report.passed:
            raise ConstructionError(
                "covering certificate failed despite per-stage hypotheses: "
                + result.cover_report.summary_line(),
                stage="cover",
            )
        overshoot = result.small_report.worst_value / eps
        eps_c *= min(0.5, 0.8 / overshoot)
        last_error = None
    raise ConstructionError(
        f"key construction failed after {max_attempts} attempts "
        f"(final eps_c={eps_c:.3g}); last error: {last_error}",
        stage="key",
    )


def _key_attempt(
    curve: CurveProfile,
    y: Point,
    arc: FiberArc,
    a_small: AlphaSet,
    a_cover: AlphaSet,
    eps: float,
    eps_c: float,
    delta_c: float,
    caps: Caps,
    segment_points: int,
    scene_id: str,
) -> KeyResult:
    chain = polygon_approx(
        curve, y, (arc.lo, arc.hi), eps_c, delta_c / 2.0, alpha_grid=a_cover
    )
    segs = chain.segments()
    for nudge in range(2):
        try:
            coords, units = _build_segments(
                curve, segs, a_small, a_cover, eps_c, delta_c, caps,
                segment_points,
            )
            break
        except ConstructionError as exc:
            if exc.stage != "band membership" or nudge == 1:
                raise
            # nudge: reseed the partition with one extra point and retry once
            chain = polygon_approx(
                curve, y, (arc.lo, arc.hi), eps_c, delta_c / 2.0,
                alpha_grid=a_cover, n0=len(chain.tangency_params) + 1,
            )
            segs = chain.segments()
    blinds = BlindSet(
        coords,
        provenance=None,
        meta={
            "kind": "key_construction",
            "eps": eps,
            "eps_c": eps_c,
            "delta": delta_c,
            "units": units,
            "chain_segments": len(segs),
        },
    )
    cover_report = check_cover(
        curve, blinds, arc, a_cover, margin=1e-9, scene_id=scene_id
    )
    small_report = check_small(curve, blinds, a_small, bound=eps, scene_id=scene_id)
    return KeyResult(blinds, chain, cover_report, small_report, eps_c, delta_c)


def _build_segments(
    curve: CurveProfile,
    segs: list[Segment],
    a_small: AlphaSet,
    a_cover: AlphaSet,
    eps_c: float,
    delta_c: float,
    caps: Caps,
    segment_points: int,
) -> tuple[np.ndarray, list[list[int]]]:
    pieces = []
    units = []  # run-length unit labels: [chain_index, blade_count, leaf_count]
    for ci, cseg in enumerate(segs):
        ts = np.linspace(0.0, 1.0, segment_points)
        cloud = np.stack(
            [
                cseg.a.x1 + ts * (cseg.b.x1 - cseg.a.x1),
                cseg.a.x2 + ts * (cseg.b.x2 - cseg.a.x2),
            ],
            axis=1,
        )
        bands = compute_bands(curve, CompactNbhd(cloud, delta_c), a_small, a_cover)
        local = local_construction(
            curve, cseg, bands, a_small, a_cover, eps_c, delta_c, caps
        )
        pieces.append(local.coords)
        units.append([ci, int(local.meta["stage1_n"]), int(len(local))])
    return np.concatenate(pieces), units
