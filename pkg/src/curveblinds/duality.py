"""Point-line duality identities: parabola slices and projection similarity.

The vertical slice of a translated parabola is (c, c^2 + ac + b); the slice
of the dual line family is (c, a + bc), and a + bc equals n_c times the
orthogonal projection of (a, b) onto direction atan(c), with n_c =
sqrt(1 + c^2) — an exact algebraic identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Point


@dataclass(frozen=True)
class LineParam:
    """The line y = a + b*x, parametrized by intercept a and slope b."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"line parameters must be finite: ({self.a!r}, {self.b!r})")


def parabola_slice(a: float, b: float, c: float) -> Point:
    """Intersection of the translated parabola P(a, b) with the line x = c."""
    return Point(c, c * c + a * c + b)


def line_slice(p: LineParam, c: float) -> Point:
    """Intersection of the line y = a + b*x with the vertical line x = c."""
    return Point(c, p.a + p.b * c)


def similarity_residual(p: LineParam, c: float) -> float:
    """|(a + bc) - n_c * pi_theta(a, b)| with n_c = sqrt(1+c^2), theta = atan(c).

    Identically zero up to float error: vertical slices of the line family
    are geometrically similar to orthogonal projections.
    """
    n_c = math.sqrt(1.0 + c * c)
    theta = math.atan(c)
    projection = p.a * math.cos(theta) + p.b * math.sin(theta)
    return abs((p.a + p.b * c) - n_c * projection)
