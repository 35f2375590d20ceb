"""The curve Gamma = graph(f) and the projection family Phi_alpha.

Phi_alpha is defined on the strip [alpha-b, alpha-a] x R by
Phi_alpha(x) = x2 + f(alpha - x1); its fibers are translated reflected
copies of Gamma.  The curve profile carries f, f', optionally the inverse
of f', the domain [a, b], and the monotonicity sense of f'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import Disk, Point
from .projline import Direction, normalize

#: Tolerance for strip-membership tests at the boundary.
DOMAIN_TOL = 1e-12

INCREASING = "increasing"
DECREASING = "decreasing"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


class DomainError(ValueError):
    """A point lies outside the strip on which Phi_alpha is defined."""


@dataclass(frozen=True, eq=False)
class CurveProfile:
    """A curve Gamma = graph(f) on [a, b] with strictly monotone f'."""

    f: Callable[[float], float]
    df: Callable[[float], float]
    a: float
    b: float
    monotone: str
    df_bound: float
    df_inverse: Optional[Callable[[float], float]] = None
    name: str = "custom"
    supports_arrays: bool = False
    #: Lipschitz constant of t -> atan(f'(t)) on [a, b]; estimated when absent.
    theta_lip: float = field(default=0.0)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"invalid domain [{self.a!r}, {self.b!r}]")
        if self.monotone not in (INCREASING, DECREASING):
            raise ValueError(f"unknown monotonicity {self.monotone!r}")
        ts = np.linspace(self.a, self.b, 129)
        ds = np.array([self.df(float(t)) for t in ts])
        diffs = np.diff(ds)
        if self.monotone == INCREASING and not np.all(diffs > 0.0):
            raise ValueError("df is not strictly increasing on the sampled grid")
        if self.monotone == DECREASING and not np.all(diffs < 0.0):
            raise ValueError("df is not strictly decreasing on the sampled grid")
        if float(np.max(np.abs(ds))) > self.df_bound + 1e-9:
            raise ValueError("df_bound does not dominate |df| on the sampled grid")
        if self.df_inverse is not None:
            for t in (self.a, 0.5 * (self.a + self.b), self.b):
                if abs(self.df_inverse(self.df(t)) - t) > 1e-10:
                    raise ValueError(
                        f"df_inverse(df({t!r})) fails the 1e-10 round-trip check"
                    )
        if self.theta_lip <= 0.0:
            fine = np.linspace(self.a, self.b, 2049)
            phi = np.arctan(np.array([self.df(float(t)) for t in fine]))
            lip = float(np.max(np.abs(np.diff(phi)))) / float(fine[1] - fine[0])
            object.__setattr__(self, "theta_lip", 1.25 * lip + 1e-12)

    # -- derivative range and inversion -----------------------------------

    def df_range(self) -> tuple[float, float]:
        """The (closed) range of f' on [a, b]."""
        lo, hi = self.df(self.a), self.df(self.b)
        return (lo, hi) if lo <= hi else (hi, lo)

    def df_inv(self, u: float, tol: float = 1e-12, max_iter: int = 200) -> float:
        """Solve f'(t) = u on [a, b]; analytic inverse or bisection fallback."""
        lo, hi = self.df_range()
        if not lo - 1e-9 <= u <= hi + 1e-9:
            raise ValueError(f"slope {u!r} outside the range of f' [{lo}, {hi}]")
        if self.df_inverse is not None:
            return min(self.b, max(self.a, self.df_inverse(min(hi, max(lo, u)))))
        sign = 1.0 if self.monotone == INCREASING else -1.0
        ta, tb = self.a, self.b
        for _ in range(max_iter):
            tm = 0.5 * (ta + tb)
            if sign * (self.df(tm) - u) < 0.0:
                ta = tm
            else:
                tb = tm
            if tb - ta <= tol:
                break
        return 0.5 * (ta + tb)

    def df_inv_array(self, u: np.ndarray) -> np.ndarray:
        """Vectorized df_inv for slopes already known to lie in range."""
        if self.supports_arrays and self.df_inverse is not None:
            lo, hi = self.df_range()
            return np.clip(self.df_inverse(np.clip(u, lo, hi)), self.a, self.b)
        return np.array([self.df_inv(float(v)) for v in np.atleast_1d(u)])

    # -- strip helpers ----------------------------------------------------

    def strip(self, alpha: float) -> tuple[float, float]:
        return (alpha - self.b, alpha - self.a)

    def in_strip(self, alpha: float, x1: float, tol: float = DOMAIN_TOL) -> bool:
        lo, hi = self.strip(alpha)
        return lo - tol <= x1 <= hi + tol

    def clamp_t(self, t: float) -> float:
        return min(self.b, max(self.a, t))


# -- operations on Phi_alpha ----------------------------------------------


def domain_strip(curve: CurveProfile, alpha: float) -> tuple[float, float]:
    """The x1-interval [alpha-b, alpha-a] on which Phi_alpha is defined."""
    return curve.strip(alpha)


def _require_in_strip(curve: CurveProfile, alpha: float, x1: float) -> None:
    if not curve.in_strip(alpha, x1):
        lo, hi = curve.strip(alpha)
        raise DomainError(
            f"x1={x1!r} outside the strip [{lo!r}, {hi!r}] of Phi_alpha, alpha={alpha!r}"
        )


def eval_phi(curve: CurveProfile, alpha: float, x: Point) -> float:
    """Phi_alpha(x) = x2 + f(alpha - x1); the height of the image on {alpha} x R."""
    _require_in_strip(curve, alpha, x.x1)
    return x.x2 + curve.f(curve.clamp_t(alpha - x.x1))


def tangent_direction(curve: CurveProfile, alpha: float, x: Point) -> Direction:
    """theta_alpha(x): the unoriented direction of (1, f'(alpha - x1))."""
    _require_in_strip(curve, alpha, x.x1)
    return normalize(math.atan(curve.df(curve.clamp_t(alpha - x.x1))))


def grad_phi(curve: CurveProfile, alpha: float, x: Point) -> tuple[float, float]:
    """The gradient (-f'(alpha - x1), 1) of Phi_alpha at x."""
    _require_in_strip(curve, alpha, x.x1)
    return (-curve.df(curve.clamp_t(alpha - x.x1)), 1.0)


def fiber_point(curve: CurveProfile, y: Point, t: float) -> Point:
    """The point of the fiber Phi_{y.x1}^{-1}(y.x2) = y - Gamma at parameter t."""
    if not curve.a - DOMAIN_TOL <= t <= curve.b + DOMAIN_TOL:
        raise ValueError(f"fiber parameter {t!r} outside [{curve.a}, {curve.b}]")
    t = curve.clamp_t(t)
    return Point(y.x1 - t, y.x2 - curve.f(t))


def diff_interval(
    curve: CurveProfile, subrange: tuple[float, float], s: float
) -> tuple[float, float]:
    """The interval I_s = {f(t+s) - f(t)} over the admissible t-range.

    The map t -> f(t+s) - f(t) is monotone (f' strictly monotone), so the
    interval endpoints sit at the extreme admissible parameters
    t = max(a-s, a') and t = min(b-s, b').
    """
    a1, b1 = subrange
    if not (curve.a - DOMAIN_TOL <= a1 <= b1 <= curve.b + DOMAIN_TOL):
        raise ValueError(f"invalid subrange {subrange!r} for [{curve.a}, {curve.b}]")
    s_lo, s_hi = curve.a - b1, curve.b - a1
    if not s_lo - DOMAIN_TOL <= s <= s_hi + DOMAIN_TOL:
        raise ValueError(f"shift {s!r} outside [{s_lo}, {s_hi}]")
    t0 = max(curve.a - s, a1)
    t1 = min(curve.b - s, b1)
    v0 = curve.f(curve.clamp_t(t0 + s)) - curve.f(curve.clamp_t(t0))
    v1 = curve.f(curve.clamp_t(t1 + s)) - curve.f(curve.clamp_t(t1))
    return (v0, v1) if v0 <= v1 else (v1, v0)


# -- project_disk ----------------------------------------------------------


def _golden_max(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Golden-section maximization of a unimodal fn on [lo, hi]."""
    h = hi - lo
    if h <= tol:
        return max(fn(lo), fn(hi))
    c = hi - _GOLDEN * h
    d = lo + _GOLDEN * h
    yc, yd = fn(c), fn(d)
    while h > tol:
        h *= _GOLDEN
        if yc > yd:
            hi, d, yd = d, c, yc
            c = hi - _GOLDEN * h
            yc = fn(c)
        else:
            lo, c, yc = c, d, yd
            d = lo + _GOLDEN * h
            yd = fn(d)
    return max(yc, yd, fn(lo), fn(hi))


def _max_over(fn: Callable[[float], float], lo: float, hi: float,
              grid: int = 512, tol: float = 1e-12) -> float:
    """Global max of a piecewise-unimodal fn: seed grid + golden refinement."""
    if hi - lo <= tol:
        return fn(0.5 * (lo + hi))
    xs = np.linspace(lo, hi, grid)
    ys = np.array([fn(float(x)) for x in xs])
    best = float(np.max(ys))
    # refine around every local maximum of the seeded values
    for i in range(grid):
        left = ys[i - 1] if i > 0 else -math.inf
        right = ys[i + 1] if i < grid - 1 else -math.inf
        if ys[i] >= left and ys[i] >= right:
            blo = xs[max(i - 1, 0)]
            bhi = xs[min(i + 1, grid - 1)]
            best = max(best, _golden_max(fn, float(blo), float(bhi), tol))
    return best


def project_disk(curve: CurveProfile, alpha: float, disk: Disk) -> tuple[float, float]:
    """The closed interval Phi_alpha(D cap strip) for a disk D.

    For fixed x1 the disk contributes x2 in [c2 - h(x1), c2 + h(x1)] with
    h(x1) = sqrt(r^2 - (x1-c1)^2), so the image endpoints are the extrema of
    c2 +/- h(x1) + f(alpha - x1) over the clipped x1-range.  The image of the
    open disk differs from this closed interval in at most the two endpoints.
    """
    lo, hi = curve.strip(alpha)
    c1, c2, r = disk.center.x1, disk.center.x2, disk.radius
    x_lo = max(lo, c1 - r)
    x_hi = min(hi, c1 + r)
    if x_lo > x_hi + DOMAIN_TOL:
        raise DomainError(
            f"disk at ({c1!r}, {c2!r}) r={r!r} misses the strip [{lo!r}, {hi!r}]"
        )
    x_hi = max(x_lo, x_hi)

    def half_width(x1: float) -> float:
        return math.sqrt(max(r * r - (x1 - c1) ** 2, 0.0))

    def upper(x1: float) -> float:
        return c2 + half_width(x1) + curve.f(curve.clamp_t(alpha - x1))

    def lower_neg(x1: float) -> float:
        return -(c2 - half_width(x1) + curve.f(curve.clamp_t(alpha - x1)))

    top = _max_over(upper, x_lo, x_hi)
    bot = -_max_over(lower_neg, x_lo, x_hi)
    return (bot, top)


# -- built-in curve library -------------------------------------------------


def _make_parabola(a: float, b: float) -> CurveProfile:
    return CurveProfile(
        f=lambda t: t * t,
        df=lambda t: 2.0 * t,
        df_inverse=lambda u: u / 2.0,
        a=a,
        b=b,
        monotone=INCREASING,
        df_bound=max(abs(2.0 * a), abs(2.0 * b)),
        name="parabola",
        supports_arrays=True,
    )


def _make_quarter_circle(a: float, b: float) -> CurveProfile:
    if not -1.0 < a < b < 1.0:
        raise ValueError(f"quarter-circle bounds must lie inside (-1, 1): [{a}, {b}]")
    return CurveProfile(
        f=lambda t: np.sqrt(1.0 - t * t),
        df=lambda t: -t / np.sqrt(1.0 - t * t),
        df_inverse=lambda u: -u / np.sqrt(1.0 + u * u),
        a=a,
        b=b,
        monotone=DECREASING,
        df_bound=max(abs(a), abs(b)) / math.sqrt(1.0 - max(abs(a), abs(b)) ** 2),
        name="quarter_circle",
        supports_arrays=True,
    )


def _make_exp(a: float, b: float) -> CurveProfile:
    return CurveProfile(
        f=np.exp,
        df=np.exp,
        df_inverse=np.log,
        a=a,
        b=b,
        monotone=INCREASING,
        df_bound=math.exp(b),
        name="exp",
        supports_arrays=True,
    )


_BUILTINS: dict[str, tuple[Callable[[float, float], CurveProfile], tuple[float, float]]] = {
    "parabola": (_make_parabola, (0.0, 1.0)),
    "quarter_circle": (_make_quarter_circle, (-0.7, 0.7)),
    "exp": (_make_exp, (0.0, 1.0)),
}


def builtin_curve(name: str, bounds: Optional[tuple[float, float]] = None) -> CurveProfile:
    """Instantiate a built-in curve profile, optionally with custom [a, b]."""
    try:
        factory, default_bounds = _BUILTINS[name]
    except KeyError:
        raise ValueError(
            f"unknown curve {name!r}; available: {sorted(_BUILTINS)}"
        ) from None
    a, b = bounds if bounds is not None else default_bounds
    return factory(a, b)


def builtin_curve_names() -> list[str]:
    return sorted(_BUILTINS)
