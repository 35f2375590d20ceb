"""Interval unions, alpha-sets, and projection measures."""

import math

import numpy as np
import pytest

from curveblinds.blinds import BlindSet
from curveblinds.curve import CurveProfile, builtin_curve, eval_phi
from curveblinds.geometry import Point, Segment
from curveblinds.measure import (
    AlphaSet,
    EMPTY,
    FiberArc,
    contains,
    measure,
    project_blinds,
    project_fiber_arc,
    project_segment,
    union_from_arrays,
    union_of,
)


def test_union_of_canonicalizes():
    u = union_of([(3.0, 4.0), (0.0, 1.0), (0.5, 2.0)])
    assert u.intervals == ((0.0, 2.0), (3.0, 4.0))
    assert math.isclose(u.measure, 3.0)
    assert measure(u) == u.measure
    assert union_of([]).is_empty
    assert EMPTY.measure == 0.0


def test_union_of_merges_dust_gaps():
    u = union_of([(0.0, 1.0), (1.0 + 1e-15, 2.0)])
    assert len(u.intervals) == 1


def test_union_of_rejects_inverted():
    with pytest.raises(ValueError):
        union_of([(1.0, 0.0)])


def test_union_from_arrays_matches_union_of():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 40))
        los = rng.uniform(-5, 5, n)
        his = los + rng.uniform(0.0, 1.0, n)
        fast = union_from_arrays(los, his)
        slow = union_of(list(zip(los.tolist(), his.tolist())))
        assert fast.intervals == slow.intervals


def test_inflate_and_erode():
    u = union_of([(0.0, 1.0), (2.0, 2.1)])
    inflated = u.inflate(0.2)
    assert math.isclose(inflated.measure, 1.4 + 0.5)
    eroded = u.erode(0.1)
    assert eroded.intervals == ((0.1, 0.9),)  # the short interval vanishes
    # erosion then inflation is a contraction
    back = eroded.inflate(0.1)
    assert contains(u, back)
    with pytest.raises(ValueError):
        u.inflate(-0.1)
    with pytest.raises(ValueError):
        u.erode(-0.1)


def test_difference():
    u = union_of([(0.0, 4.0)])
    v = union_of([(1.0, 2.0), (3.0, 5.0)])
    d = u.difference(v)
    assert d.intervals == ((0.0, 1.0), (2.0, 3.0))
    assert u.difference(u).is_empty


def test_contains_with_margin():
    u = union_of([(0.0, 1.0)])
    t = union_of([(0.1, 0.9)])
    assert contains(u, t)
    assert not contains(t, u)
    assert contains(t, u, margin=0.2)
    with pytest.raises(ValueError):
        contains(u, t, margin=-1.0)


def test_contains_requires_single_component_cover():
    u = union_of([(0.0, 0.4), (0.6, 1.0)])
    t = union_of([(0.1, 0.9)])  # spans the gap
    assert not contains(u, t)


def test_alpha_set_grid_and_membership():
    aset = AlphaSet.from_intervals([(0.0, 1.0), (2.0, 2.5)], points_per_component=11)
    grid = aset.grid()
    assert grid[0] == 0.0 and grid[-1] == 2.5
    # spacing within each component is at most grid_step
    for lo, hi in aset.components:
        inside = grid[(grid >= lo) & (grid <= hi)]
        assert inside[0] == lo and inside[-1] == hi
        assert np.all(np.diff(inside) <= aset.grid_step + 1e-12)
    assert aset.contains_alpha(0.5)
    assert not aset.contains_alpha(1.5)
    assert aset.bounds == (0.0, 2.5)


def test_alpha_set_validation():
    with pytest.raises(ValueError):
        AlphaSet((), 0.1)
    with pytest.raises(ValueError):
        AlphaSet(((0.0, 1.0), (0.5, 2.0)), 0.1)
    with pytest.raises(ValueError):
        AlphaSet(((1.0, 0.0),), 0.1)
    with pytest.raises(ValueError):
        AlphaSet(((0.0, 1.0),), -0.1)


def _segment_oracle(curve, alpha, seg, samples=20001):
    """Min/max of Phi_alpha over the strip-clipped segment, by dense sampling."""
    ts = np.linspace(0.0, 1.0, samples)
    lo, hi = curve.strip(alpha)
    vals = []
    for t in ts:
        p = seg.point_at(float(t))
        if lo - 1e-12 <= p.x1 <= hi + 1e-12:
            vals.append(eval_phi(curve, alpha, Point(min(hi, max(lo, p.x1)), p.x2)))
    return (min(vals), max(vals)) if vals else None


def test_project_segment_matches_sampling_oracle():
    rng = np.random.default_rng(1)
    for name in ("parabola", "quarter_circle", "exp"):
        curve = builtin_curve(name)
        for _ in range(20):
            alpha = float(rng.uniform(curve.a - 0.3, curve.b + 0.8))
            a = Point(float(rng.uniform(alpha - 1.5, alpha + 0.5)), float(rng.uniform(-1, 1)))
            b = Point(a.x1 + float(rng.uniform(-0.8, 0.8)), a.x2 + float(rng.uniform(-0.8, 0.8)))
            if a == b:
                continue
            seg = Segment(a, b)
            u = project_segment(curve, alpha, seg)
            oracle = _segment_oracle(curve, alpha, seg)
            if oracle is None:
                assert u.is_empty
                continue
            if u.is_empty:
                # clipped sliver below sampling resolution
                continue
            (lo, hi), (olo, ohi) = u.intervals[0], oracle
            # exact interval contains the sampled values ...
            assert lo <= olo + 1e-9
            assert hi >= ohi - 1e-9
            # ... and the sampling approaches the endpoints (first order at
            # clipped boundaries, hence the looser tolerance)
            assert abs(lo - olo) < 1e-4
            assert abs(hi - ohi) < 1e-4


def test_project_segment_vertical():
    curve = builtin_curve("parabola")
    seg = Segment(Point(1.5, 0.0), Point(1.5, 2.0))
    u = project_segment(curve, 2.0, seg)
    base = curve.f(0.5)
    assert u.intervals == ((base, 2.0 + base),)
    assert project_segment(curve, 5.0, seg).is_empty


def test_project_fiber_arc_matches_sampling():
    rng = np.random.default_rng(2)
    for name in ("parabola", "exp"):
        curve = builtin_curve(name)
        y = Point(0.5, 1.0)
        arc = FiberArc(y, curve.a + 0.1, curve.b - 0.1)
        for _ in range(10):
            alpha = float(rng.uniform(curve.a + 0.7, curve.b + 0.5))
            u = project_fiber_arc(curve, alpha, arc)
            s = alpha - y.x1
            t0 = max(arc.lo, curve.a - s, curve.a)
            t1 = min(arc.hi, curve.b - s, curve.b)
            if t0 > t1:
                assert u.is_empty
                continue
            ts = np.linspace(t0, t1, 5001)
            vals = [
                y.x2 - curve.f(curve.clamp_t(t)) + curve.f(curve.clamp_t(t + s))
                for t in ts
            ]
            lo, hi = u.intervals[0]
            assert abs(lo - min(vals)) < 1e-9
            assert abs(hi - max(vals)) < 1e-9


def test_fiber_arc_rejects_empty_range():
    with pytest.raises(ValueError):
        FiberArc(Point(0.0, 0.0), 1.0, 1.0)


def test_project_blinds_fast_path_matches_slow_path():
    fast_curve = builtin_curve("parabola")
    slow_curve = CurveProfile(
        f=lambda t: t * t,
        df=lambda t: 2.0 * t,
        a=0.0,
        b=1.0,
        monotone="increasing",
        df_bound=2.0,
        supports_arrays=False,
    )
    rng = np.random.default_rng(4)
    coords = rng.uniform(0.5, 2.0, size=(40, 4))
    blinds = BlindSet(coords)
    for alpha in (1.2, 1.8, 2.4):
        fast = project_blinds(fast_curve, alpha, blinds)
        slow = project_blinds(slow_curve, alpha, blinds)
        assert len(fast.intervals) == len(slow.intervals)
        for (flo, fhi), (slo, shi) in zip(fast.intervals, slow.intervals):
            assert abs(flo - slo) < 1e-9
            assert abs(fhi - shi) < 1e-9
