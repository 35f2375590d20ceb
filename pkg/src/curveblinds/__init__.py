"""Constructions and numerical certificates for curve-translate projections.

The package builds iterated Venetian-blind replacements of line segments
whose generalized projections (vertical slices of translated curve graphs)
cover prescribed fiber arcs over one parameter set while staying small over
another, and certifies both properties on dense parameter grids.
"""

from .blinds import (
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
from .curve import (
    CurveProfile,
    DomainError,
    builtin_curve,
    builtin_curve_names,
    diff_interval,
    domain_strip,
    eval_phi,
    fiber_point,
    grad_phi,
    project_disk,
    tangent_direction,
)
from .duality import LineParam, line_slice, parabola_slice, similarity_residual
from .geometry import Disk, Point, Segment
from .keylemma import (
    AngleBands,
    CompactNbhd,
    KeyResult,
    PolyChain,
    SeparationError,
    compute_bands,
    key_construction,
    local_construction,
    polygon_approx,
)
from .measure import (
    AlphaSet,
    FiberArc,
    IntervalUnion,
    contains,
    measure,
    project_blinds,
    project_fiber_arc,
    project_segment,
    union_of,
)
from .projline import (
    CCW,
    CW,
    Arc,
    Direction,
    angle_schedule,
    arc_contains,
    as_direction,
    dist,
    normalize,
)
from .scene import SceneError, SceneSpec, load_scene
from .verify import (
    VerificationReport,
    check_cover,
    check_small,
    gradient_check,
    law_of_sines_check,
)

__version__ = "0.1.0"

__all__ = [
    "CCW",
    "CW",
    "AlphaSet",
    "AngleBands",
    "Arc",
    "BlindSet",
    "BranchTree",
    "Caps",
    "CompactNbhd",
    "ConstructionError",
    "CurveProfile",
    "Direction",
    "Disk",
    "DomainError",
    "FiberArc",
    "IntervalUnion",
    "KeyResult",
    "LineParam",
    "Point",
    "PolyChain",
    "SceneError",
    "SceneSpec",
    "Segment",
    "SeparationError",
    "VerificationReport",
    "angle_schedule",
    "arc_contains",
    "as_direction",
    "auto_iter_vb",
    "auto_vb_cover",
    "builtin_curve",
    "builtin_curve_names",
    "check_cover",
    "check_small",
    "compute_bands",
    "contains",
    "diff_interval",
    "dist",
    "divide",
    "domain_strip",
    "eval_phi",
    "fiber_point",
    "grad_phi",
    "gradient_check",
    "iter_vb",
    "key_construction",
    "law_of_sines_check",
    "line_slice",
    "load_scene",
    "local_construction",
    "measure",
    "normalize",
    "parabola_slice",
    "polygon_approx",
    "project_blinds",
    "project_disk",
    "project_fiber_arc",
    "project_segment",
    "rotate",
    "similarity_residual",
    "tangent_direction",
    "union_of",
    "vb",
]
