"""The blind construction stack: divide, rotate, vb, iterated blinds."""

import math

import numpy as np
import pytest

from curveblinds.blinds import (
    BlindSet,
    BranchTree,
    Caps,
    ConstructionError,
    auto_iter_vb,
    auto_vb_cover,
    divide,
    iter_vb,
    rotate,
    vb,
)
from curveblinds.curve import builtin_curve
from curveblinds.geometry import Point, Segment
from curveblinds.measure import AlphaSet, contains, project_blinds, project_segment
from curveblinds.projline import CCW, CW, dist, normalize

SEG = Segment(Point(0.0, 0.0), Point(1.0, 0.3))


def test_divide_pieces_partition_segment():
    pieces = divide(SEG, 7)
    assert len(pieces) == 7
    assert pieces[0].a == SEG.a
    assert pieces[-1].b == SEG.b
    for p, q in zip(pieces, pieces[1:]):
        assert p.b == q.a
    assert math.isclose(sum(p.length for p in pieces), SEG.length, rel_tol=1e-12)
    with pytest.raises(ValueError):
        divide(SEG, 0)


def test_rotate_directions():
    theta_small = normalize(1.2)
    theta_cover = normalize(2.1)
    out = rotate(SEG, theta_small, theta_cover)
    assert out.a == SEG.a
    assert dist(out.direction, theta_small) < 1e-9
    closing = Segment(SEG.b, out.b)
    assert dist(closing.direction, theta_cover) < 1e-9


def test_rotate_accepts_raw_floats():
    out = rotate(SEG, 1.2, 2.1)
    assert dist(out.direction, 1.2) < 1e-9


def test_rotate_rejects_degenerate_angles():
    with pytest.raises(ValueError):
        rotate(SEG, SEG.direction, 2.1)
    with pytest.raises(ValueError):
        rotate(SEG, 1.2, 1.2)


def test_vb_blades_and_provenance():
    blinds = vb(SEG, 1.2, 2.1, 5)
    assert len(blinds) == 5
    assert blinds.provenance == [(i,) for i in range(5)]
    for blade in blinds.segments:
        assert dist(blade.direction, 1.2) < 1e-9
    assert blinds.meta["chirality"] == CCW


def test_vb_orientation_violation():
    # requesting the chirality whose arc misses the segment direction
    with pytest.raises(ValueError):
        vb(SEG, 1.2, 2.1, 3, chirality=CW)


def test_branch_tree_shapes():
    t = BranchTree.uniform(3, 2)
    assert t.n_children(()) == 2
    assert t.n_children((0, 1)) == 2
    with pytest.raises(ValueError):
        t.n_children((0, 0, 0))
    t2 = BranchTree.per_level([2, 3])
    assert t2.n_children((1,)) == 3
    t3 = BranchTree(2, {(): 2, (0,): 1, (1,): 4})
    assert t3.n_children((1,)) == 4
    with pytest.raises(ValueError):
        t3.n_children((0, 0))
    with pytest.raises(ValueError):
        BranchTree(0, [])
    with pytest.raises(ValueError):
        BranchTree(2, [2])
    with pytest.raises(ValueError):
        BranchTree.uniform(2, 0)


def test_iter_vb_leaves_and_directions():
    tree = BranchTree.per_level([2, 3])
    blinds = iter_vb(SEG, 1.4, 2.4, tree, chirality=CCW)
    assert len(blinds) == 6
    for leaf in blinds.segments:
        assert dist(leaf.direction, 1.4) < 1e-9
    assert sorted(blinds.provenance) == [
        (i, j) for i in range(2) for j in range(3)
    ]


def test_iter_vb_rejects_bad_chirality():
    with pytest.raises(ValueError):
        iter_vb(SEG, 1.4, 2.4, BranchTree.uniform(2, 2), chirality="left")


def test_blind_set_json_roundtrip():
    blinds = vb(SEG, 1.2, 2.1, 4)
    data = blinds.to_json_dict()
    back = BlindSet.from_json_dict(data)
    assert np.allclose(back.coords, blinds.coords)
    assert back.provenance == blinds.provenance
    assert back.meta["kind"] == "vb"


def test_blind_set_validation():
    with pytest.raises(ValueError):
        BlindSet(np.zeros((0, 4)))
    with pytest.raises(ValueError):
        BlindSet(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        BlindSet(np.ones((2, 4)), provenance=[(0,)])


def test_blind_set_total_length_and_distance():
    blinds = BlindSet.from_segments([SEG])
    assert math.isclose(blinds.total_length, SEG.length)
    assert blinds.max_distance_to(SEG) < 1e-15


def _q1_context():
    """A covering-ready configuration on the quarter-circle curve."""
    curve = builtin_curve("quarter_circle")
    a_cover = AlphaSet.interval(0.4, 0.48, 50)
    seg = Segment(Point(-0.1, 0.9), Point(-0.08, 0.91))
    return curve, a_cover, seg


def test_auto_vb_cover_certifies_projection_containment():
    curve, a_cover, seg = _q1_context()
    n, blinds = auto_vb_cover(curve, seg, 0.6, 2.5, a_cover, n_max=2**14)
    assert len(blinds) == n
    # independent oracle: the blind projections must cover the segment's
    for alpha in a_cover.grid():
        target = project_segment(curve, float(alpha), seg)
        got = project_blinds(curve, float(alpha), blinds)
        assert contains(got, target, 1e-9)


def test_auto_vb_cover_respects_max_offset():
    curve, a_cover, seg = _q1_context()
    n, blinds = auto_vb_cover(
        curve, seg, 0.6, 2.5, a_cover, n_max=2**16, max_offset=0.002
    )
    assert blinds.max_distance_to(seg) <= 0.002 + 1e-12


def test_auto_vb_cover_cap_error():
    curve, a_cover, seg = _q1_context()
    with pytest.raises(ConstructionError):
        # an unattainable blade-offset bound forces the doubling past the cap
        auto_vb_cover(curve, seg, 0.6, 2.5, a_cover, n_max=64, max_offset=1e-12)


def test_auto_iter_vb_stays_within_budget_and_reaches_small_direction():
    curve, a_cover, seg = _q1_context()
    eps = 0.05
    blinds = auto_iter_vb(
        curve, seg, 0.75, 2.5, eps, a_cover=a_cover, chirality=CCW,
        caps=Caps(n_max=2**20, m_max=128), delta=0.01,
    )
    for leaf in blinds.segments:
        assert dist(leaf.direction, 0.75) < 1e-9
    # every leaf stays within the seed radius delta0 of the base segment
    assert blinds.max_distance_to(seg) <= blinds.meta["delta0"] + 1e-12
    assert blinds.meta["depth"] == len(blinds.meta["level_counts"])


def test_auto_iter_vb_preconditions():
    curve, a_cover, seg = _q1_context()
    long_seg = Segment(Point(-0.1, 0.9), Point(0.3, 1.1))
    with pytest.raises(ConstructionError):
        auto_iter_vb(curve, long_seg, 0.75, 2.5, 0.05)
    with pytest.raises(ValueError):
        auto_iter_vb(curve, seg, 0.75, 2.5, -1.0)
    with pytest.raises(ConstructionError):
        # depth cap too small for the requested arc/eps
        auto_iter_vb(curve, seg, 0.75, 2.5, 0.05, caps=Caps(m_max=2))


def test_auto_iter_vb_small_set_precondition():
    curve, a_cover, seg = _q1_context()
    # over alpha ~ 0, theta_alpha(seg.a) ~ atan(df(0.1)) ~ -0.1 rad which is
    # far outside the short schedule arc [seg.dir, seg.dir + eps]
    a_small = AlphaSet.interval(-0.05, 0.05, 20)
    with pytest.raises(ConstructionError):
        auto_iter_vb(
            curve, seg, normalize(seg.direction.angle + 0.04), 2.5, 0.05,
            a_small=a_small, chirality=CCW,
        )
