"""The Venetian-blind construction stack.

DIVIDE splits a segment into equal pieces; ROTATE replaces a piece by the
segment from its start to the intersection of two direction lines; VB does
both; IterVB iterates VB along an equally spaced angle schedule over a
finite branching tree.  The auto_* searches realize the paper-style
"sufficiently large" parameters as predicate-checked doubling with caps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .curve import CurveProfile
from .geometry import Point, Segment
from .measure import AlphaSet
from .projline import (
    ANGLE_TOL,
    CCW,
    CHIRALITIES,
    PI,
    Arc,
    Direction,
    angle_schedule,
    as_direction,
    ccw_delta,
    dist,
)


class ConstructionError(RuntimeError):
    """A blind construction failed; carries the failing stage information."""

    def __init__(self, message: str, stage: object = None, witness: object = None):
        super().__init__(message)
        self.stage = stage
        self.witness = witness


@dataclass(frozen=True)
class Caps:
    """Hard caps for the parameter searches."""

    n_max: int = 2**20
    m_max: int = 64


DEFAULT_CAPS = Caps()


@dataclass(frozen=True)
class BranchTree:
    """A finite tree of depth m with per-node branching counts N_i >= 1.

    ``branching`` is either a sequence of per-level counts (uniform within
    each level, the default shape) or a mapping from node index tuples to
    counts for full generality.
    """

    depth: int
    branching: Sequence[int] | Mapping[tuple[int, ...], int]

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError(f"tree depth must be >= 1, got {self.depth}")
        if isinstance(self.branching, Mapping):
            for idx, n in self.branching.items():
                if n < 1:
                    raise ValueError(f"branching count at {idx!r} must be >= 1")
        else:
            if len(self.branching) != self.depth:
                raise ValueError(
                    f"need one branching count per level: {len(self.branching)} != {self.depth}"
                )
            if any(n < 1 for n in self.branching):
                raise ValueError("branching counts must be >= 1")

    @classmethod
    def uniform(cls, depth: int, n: int) -> "BranchTree":
        return cls(depth, tuple([n] * depth))

    @classmethod
    def per_level(cls, counts: Sequence[int]) -> "BranchTree":
        return cls(len(counts), tuple(counts))

    def n_children(self, index: tuple[int, ...]) -> int:
        """Branching count of the internal node at the given index."""
        level = len(index)
        if level >= self.depth:
            raise ValueError(f"node {index!r} is a leaf of depth-{self.depth} tree")
        if isinstance(self.branching, Mapping):
            try:
                return self.branching[index]
            except KeyError:
                raise ValueError(f"no branching count stored for node {index!r}") from None
        return self.branching[level]


@dataclass
class BlindSet:
    """A finite union of segments with construction provenance.

    ``coords`` holds one row (ax, ay, bx, by) per segment; ``provenance``
    (optional) holds one tree index tuple per segment; ``meta`` records the
    construction parameters.
    """

    coords: np.ndarray
    provenance: Optional[list[tuple[int, ...]]] = None
    meta: dict = field(default_factory=dict)
    _segments: Optional[list[Segment]] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim != 2 or self.coords.shape[1] != 4 or self.coords.shape[0] == 0:
            raise ValueError("coords must be a nonempty (n, 4) array")
        if self.provenance is not None and len(self.provenance) != len(self.coords):
            raise ValueError("provenance length must match segment count")

    @classmethod
    def from_segments(
        cls,
        segments: Sequence[Segment],
        provenance: Optional[list[tuple[int, ...]]] = None,
        meta: Optional[dict] = None,
    ) -> "BlindSet":
        coords = np.array(
            [[s.a.x1, s.a.x2, s.b.x1, s.b.x2] for s in segments], dtype=float
        )
        return cls(coords, provenance, meta or {})

    @property
    def segments(self) -> list[Segment]:
        if self._segments is None:
            self._segments = [
                Segment(Point(ax, ay), Point(bx, by)) for ax, ay, bx, by in self.coords
            ]
        return self._segments

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def total_length(self) -> float:
        d = self.coords[:, 2:4] - self.coords[:, 0:2]
        return float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    def max_distance_to(self, seg: Segment) -> float:
        """Largest endpoint distance from this set to the given segment."""
        pts = np.concatenate([self.coords[:, 0:2], self.coords[:, 2:4]])
        return float(
            max(_points_to_segment_distance(pts, seg.a.as_tuple(), seg.b.as_tuple()))
        )

    def to_json_dict(self) -> dict:
        out = {
            "segments": [[float(v) for v in row] for row in self.coords],
            "meta": _jsonable(self.meta),
        }
        if self.provenance is not None:
            out["provenance"] = [list(idx) for idx in self.provenance]
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "BlindSet":
        prov = data.get("provenance")
        return cls(
            np.array(data["segments"], dtype=float),
            [tuple(idx) for idx in prov] if prov is not None else None,
            dict(data.get("meta", {})),
        )


def _jsonable(value):
    if isinstance(value, Direction):
        return value.angle
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _points_to_segment_distance(
    pts: np.ndarray, a: tuple[float, float], b: tuple[float, float]
) -> np.ndarray:
    v = np.array(b) - np.array(a)
    w = pts - np.array(a)
    t = np.clip((w @ v) / float(v @ v), 0.0, 1.0)
    closest = np.outer(t, v)
    return np.hypot(w[:, 0] - closest[:, 0], w[:, 1] - closest[:, 1])


# -- the elementary constructions ------------------------------------------


def divide(seg: Segment, n: int) -> list[Segment]:
    """Split a segment into n equal, consecutive, orientation-keeping pieces."""
    if n < 1:
        raise ValueError(f"piece count must be >= 1, got {n}")
    pts = [seg.point_at(i / n) for i in range(n + 1)]
    return [Segment(pts[i], pts[i + 1]) for i in range(n)]


def rotate(seg: Segment, theta_small: Direction, theta_cover: Direction) -> Segment:
    """ROTATE(seg): the segment from seg.a to the intersection point c.

    c is where the line through seg.a with direction theta_small meets the
    line through seg.b with direction theta_cover; thus the result has
    direction theta_small and LINE(seg.b, c) has direction theta_cover.
    """
    theta_small = as_direction(theta_small)
    theta_cover = as_direction(theta_cover)
    theta_seg = seg.direction
    for u, v, labels in (
        (theta_seg, theta_small, "segment/small"),
        (theta_seg, theta_cover, "segment/cover"),
        (theta_small, theta_cover, "small/cover"),
    ):
        if dist(u, v) <= ANGLE_TOL:
            raise ValueError(
                f"degenerate angle configuration ({labels}): {u} vs {v}"
            )
    cs, ss = math.cos(theta_small.angle), math.sin(theta_small.angle)
    cc, sc = math.cos(theta_cover.angle), math.sin(theta_cover.angle)
    # a + s*(cs, ss) = b + t*(cc, sc); solve for s by 2x2 cross products
    det = cs * sc - ss * cc  # sin(theta_cover - theta_small), bounded away from 0
    wx = seg.b.x1 - seg.a.x1
    wy = seg.b.x2 - seg.a.x2
    s = (wx * sc - wy * cc) / det
    c = Point(seg.a.x1 + s * cs, seg.a.x2 + s * ss)
    return Segment(seg.a, c)


def _infer_chirality(
    theta_seg: Direction, theta_small: Direction, theta_cover: Direction
) -> str:
    """The chirality whose arc from theta_cover to theta_small contains theta_seg."""
    for chir in CHIRALITIES:
        if Arc(theta_cover, theta_small, chir).contains_strictly(theta_seg):
            return chir
    raise ValueError(
        f"orientation violation: segment direction {theta_seg} lies on neither "
        f"open arc from {theta_cover} to {theta_small}"
    )


def vb(
    seg: Segment,
    theta_small: Direction,
    theta_cover: Direction,
    n: int,
    chirality: Optional[str] = None,
) -> BlindSet:
    """VB: divide into n pieces and rotate each one.

    The segment direction must lie strictly inside the arc from theta_cover
    to theta_small (in the given chirality, inferred when omitted).
    """
    theta_small = as_direction(theta_small)
    theta_cover = as_direction(theta_cover)
    theta_seg = seg.direction
    inferred = _infer_chirality(theta_seg, theta_small, theta_cover)
    if chirality is not None and chirality != inferred:
        raise ValueError(
            f"orientation violation: segment direction {theta_seg} is not interior "
            f"to the {chirality} arc from {theta_cover} to {theta_small}"
        )
    blades = [rotate(piece, theta_small, theta_cover) for piece in divide(seg, n)]
    return BlindSet.from_segments(
        blades,
        provenance=[(i,) for i in range(n)],
        meta={
            "kind": "vb",
            "theta_small": theta_small,
            "theta_cover": theta_cover,
            "chirality": inferred,
            "n": n,
        },
    )


def iter_vb(
    seg: Segment,
    theta_small: Direction,
    theta_cover: Direction,
    tree: BranchTree,
    chirality: str = CCW,
) -> BlindSet:
    """IterVB: recursive blinds along the angle schedule over a finite tree."""
    if chirality not in CHIRALITIES:
        raise ValueError(f"unknown chirality {chirality!r}")
    theta_small = as_direction(theta_small)
    theta_cover = as_direction(theta_cover)
    schedule = angle_schedule(seg.direction, theta_small, tree.depth, chirality)
    leaves: list[Segment] = []
    provenance: list[tuple[int, ...]] = []

    def build(node: Segment, index: tuple[int, ...]) -> None:
        level = len(index)
        if level == tree.depth:
            leaves.append(node)
            provenance.append(index)
            return
        n = tree.n_children(index)
        try:
            stage = vb(node, schedule[level + 1], theta_cover, n, chirality)
        except ValueError as exc:
            raise ConstructionError(
                f"stage {level + 1} blind failed at tree index {index!r}: {exc}",
                stage=index,
            ) from exc
        for child_i, child in enumerate(stage.segments):
            build(child, index + (child_i,))

    build(seg, ())
    return BlindSet.from_segments(
        leaves,
        provenance=provenance,
        meta={
            "kind": "iter_vb",
            "theta_small": theta_small,
            "theta_cover": theta_cover,
            "chirality": chirality,
            "depth": tree.depth,
            "schedule": [d.angle for d in schedule],
        },
    )


# -- vectorized level construction -----------------------------------------


def _divide_rotate_level(
    coords: np.ndarray, target: Direction, cover: Direction, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Divide every segment into n pieces and rotate each to ``target``.

    Returns (children, hulls): children is the (k*n, 4) coordinate array of
    the new blades; hulls is (k*n, 6) with rows (pax, pay, pbx, pby, cx, cy)
    holding each piece's triangle hull vertices.
    """
    ax, ay, bx, by = coords[:, 0], coords[:, 1], coords[:, 2], coords[:, 3]
    fracs = np.arange(n + 1) / n
    px = ax[:, None] + (bx - ax)[:, None] * fracs
    py = ay[:, None] + (by - ay)[:, None] * fracs
    pax, pbx = px[:, :-1], px[:, 1:]
    pay, pby = py[:, :-1], py[:, 1:]
    target = as_direction(target)
    cover = as_direction(cover)
    if dist(target, cover) <= ANGLE_TOL:
        raise ValueError(
            f"degenerate angle configuration (target/cover): {target} vs {cover}"
        )
    cs, ss = math.cos(target.angle), math.sin(target.angle)
    cc, sc = math.cos(cover.angle), math.sin(cover.angle)
    det = cs * sc - ss * cc
    wx = pbx - pax
    wy = pby - pay
    s = (wx * sc - wy * cc) / det
    cx = pax + s * cs
    cy = pay + s * ss
    children = np.stack(
        [pax.ravel(), pay.ravel(), cx.ravel(), cy.ravel()], axis=1
    )
    hulls = np.stack(
        [pax.ravel(), pay.ravel(), pbx.ravel(), pby.ravel(), cx.ravel(), cy.ravel()],
        axis=1,
    )
    return children, hulls


def _hulls_cover_ok(
    curve: CurveProfile,
    hulls: np.ndarray,
    level_dir: Direction,
    theta_cover: Direction,
    chirality: str,
    a_cover: AlphaSet,
    interior_tol: float = 1e-9,
) -> bool:
    """Covering hypotheses for every piece's triangle hull over A_cover.

    Checks that each hull lies in the strip interior for every alpha in the
    cover set and that theta_alpha over the hull stays inside the closed arc
    from theta_cover to the current level direction (traversed in the
    construction chirality).  theta_alpha depends only on x1 and is monotone
    in it, so hull x1-extremes suffice; the alpha-interval hull [amin, amax]
    dominates every grid point.
    """
    x1 = hulls[:, (0, 2, 4)]
    x1min = np.min(x1, axis=1)
    x1max = np.max(x1, axis=1)
    amin, amax = a_cover.bounds
    # strip interior for all alpha in [amin, amax]
    if np.min(x1min) <= amax - curve.b + interior_tol:
        return False
    if np.max(x1max) >= amin - curve.a - interior_tol:
        return False
    t_lo = amin - x1max
    t_hi = amax - x1min
    phi_at_tlo = np.arctan(curve.df(np.clip(t_lo, curve.a, curve.b)))
    phi_at_thi = np.arctan(curve.df(np.clip(t_hi, curve.a, curve.b)))
    phi_lo = np.minimum(phi_at_tlo, phi_at_thi)
    phi_hi = np.maximum(phi_at_tlo, phi_at_thi)
    arc = Arc(theta_cover, level_dir, chirality)
    length = arc.length
    start = theta_cover.angle
    if chirality == CCW:
        u_first = np.mod(phi_lo - start, PI)
        u_second = np.mod(phi_hi - start, PI)
    else:
        u_first = np.mod(start - phi_hi, PI)
        u_second = np.mod(start - phi_lo, PI)
    # the phi-interval [phi_lo, phi_hi] sits inside the arc iff both endpoint
    # offsets are within the length and ordered consistently with traversal
    tol = 1e-12
    ok = (u_first <= u_second + tol) & (u_second <= length + tol)
    return bool(np.all(ok))


def auto_vb_cover(
    curve: CurveProfile,
    seg: Segment,
    theta_small: Direction,
    theta_cover: Direction,
    a_cover: AlphaSet,
    n0: int = 1,
    n_max: int = 2**20,
    max_offset: Optional[float] = None,
) -> tuple[int, BlindSet]:
    """Double N until the one-stage covering hypotheses certify over A_cover.

    Optionally also requires all blades to stay within ``max_offset`` of the
    base segment.  Returns the first passing (N, BlindSet).
    """
    theta_small = as_direction(theta_small)
    theta_cover = as_direction(theta_cover)
    theta_seg = seg.direction
    chirality = _infer_chirality(theta_seg, theta_small, theta_cover)
    coords = np.array([[seg.a.x1, seg.a.x2, seg.b.x1, seg.b.x2]])
    n = max(1, n0)
    while n <= n_max:
        children, hulls = _divide_rotate_level(coords, theta_small, theta_cover, n)
        ok = _hulls_cover_ok(curve, hulls, theta_seg, theta_cover, chirality, a_cover)
        if ok and max_offset is not None:
            d = _points_to_segment_distance(
                np.concatenate([children[:, 0:2], children[:, 2:4]]),
                seg.a.as_tuple(),
                seg.b.as_tuple(),
            )
            ok = float(np.max(d)) <= max_offset
        if ok:
            return n, BlindSet(
                children,
                provenance=[(i,) for i in range(n)],
                meta={
                    "kind": "auto_vb_cover",
                    "theta_small": theta_small,
                    "theta_cover": theta_cover,
                    "chirality": chirality,
                    "n": n,
                },
            )
        n *= 2
    raise ConstructionError(
        f"auto_vb_cover exceeded N_max={n_max} for segment of length {seg.length:.3g} "
        f"(theta_seg={theta_seg}, theta_small={theta_small}, theta_cover={theta_cover})",
        stage="vb_cover",
        witness=(a_cover.bounds, seg),
    )


def auto_iter_vb(
    curve: CurveProfile,
    seg: Segment,
    theta_small: Direction,
    theta_cover: Direction,
    eps: float,
    a_small: Optional[AlphaSet] = None,
    a_cover: Optional[AlphaSet] = None,
    chirality: str = CCW,
    caps: Caps = DEFAULT_CAPS,
    delta: Optional[float] = None,
) -> BlindSet:
    """Iterated blinds with automatically chosen depth and branching.

    Depth m makes the schedule step smaller than eps.  Per level, the
    branching count doubles until (i) every blade stays within the level's
    share of the neighborhood budget of its parent (so stage neighborhoods
    nest into B(seg.a, 2*eps)) and (ii) with A_cover present, the one-stage
    covering hypotheses certify for every piece.
    """
    if chirality not in CHIRALITIES:
        raise ValueError(f"unknown chirality {chirality!r}")
    theta_small = as_direction(theta_small)
    theta_cover = as_direction(theta_cover)
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if seg.length >= eps:
        raise ConstructionError(
            f"segment length {seg.length:.3g} must be below eps={eps:.3g}",
            stage="precondition",
        )
    theta0 = seg.direction
    total_arc = (
        ccw_delta(theta0, theta_small)
        if chirality == CCW
        else ccw_delta(theta_small, theta0)
    )
    if total_arc <= ANGLE_TOL:
        raise ConstructionError(
            "segment already points in the small direction", stage="precondition"
        )
    m = max(1, math.ceil(total_arc / eps - 1e-12))
    if m > caps.m_max:
        raise ConstructionError(
            f"required depth m={m} exceeds cap {caps.m_max} "
            f"(arc {total_arc:.3g}, eps {eps:.3g})",
            stage="depth",
        )
    schedule = angle_schedule(theta0, theta_small, m, chirality)

    if a_small is not None:
        band = Arc(theta0, theta_small, chirality)
        for alpha in a_small.grid():
            t = alpha - seg.a.x1
            if not curve.a - 1e-12 <= t <= curve.b + 1e-12:
                continue  # base point outside dom Phi_alpha; hypothesis vacuous
            phi = math.atan(curve.df(curve.clamp_t(t)))
            if not band.contains(phi, tol=1e-9):
                raise ConstructionError(
                    f"theta_alpha(seg.a) = {phi:.6g} outside the schedule arc at "
                    f"alpha={float(alpha):.6g}",
                    stage="precondition",
                    witness=float(alpha),
                )

    delta0 = min(eps, delta) / 4.0 if delta is not None else eps / 4.0
    # Geometrically decaying neighborhood radii delta_k = delta0 / 2^k: every
    # descendant of a level-k piece stays within delta_k of it, so at any
    # alpha the leaves squeeze onto the pieces of the direction-matching
    # level; the per-level drift allowance is delta_k - delta_{k+1}.
    shrink = 0.5

    coords = np.array([[seg.a.x1, seg.a.x2, seg.b.x1, seg.b.x2]])
    level_counts: list[int] = []
    for k in range(m):
        level_dir = schedule[k]
        target = schedule[k + 1]
        allowance = delta0 * shrink**k * (1.0 - shrink)
        n = 1
        while True:
            children, hulls = _divide_rotate_level(coords, target, theta_cover, n)
            # blade tips' distance to their own parent segment
            disp = _max_child_offset(coords, children, n)
            ok = disp <= allowance
            if ok and a_cover is not None:
                ok = _hulls_cover_ok(
                    curve, hulls, level_dir, theta_cover, chirality, a_cover
                )
            if ok:
                break
            n *= 2
            if n * coords.shape[0] > caps.n_max:
                raise ConstructionError(
                    f"branching cap {caps.n_max} exceeded at level {k + 1}/{m} "
                    f"(deepest satisfied stage: {k})",
                    stage=k,
                )
        coords = children
        level_counts.append(n)

    return BlindSet(
        coords,
        provenance=None,
        meta={
            "kind": "auto_iter_vb",
            "theta_small": theta_small,
            "theta_cover": theta_cover,
            "chirality": chirality,
            "depth": m,
            "level_counts": level_counts,
            "eps": eps,
            "delta0": delta0,
            "schedule": [d.angle for d in schedule],
        },
    )


def _max_child_offset(parents: np.ndarray, children: np.ndarray, n: int) -> float:
    """Largest distance from a blade tip to the parent segment it came from."""
    k = parents.shape[0]
    tips = children[:, 2:4].reshape(k, n, 2)
    a = parents[:, 0:2][:, None, :]
    v = (parents[:, 2:4] - parents[:, 0:2])[:, None, :]
    w = tips - a
    vv = np.sum(v * v, axis=2)
    t = np.clip(np.sum(w * v, axis=2) / vv, 0.0, 1.0)
    d = w - t[:, :, None] * v
    return float(np.max(np.hypot(d[:, :, 0], d[:, :, 1])))
