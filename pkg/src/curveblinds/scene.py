"""Scene specifications: JSON ingestion, validation, bundled scenes.

A scene bundles the key-construction inputs: the curve, the fiber point y,
the parameter subrange of the fiber arc, the alpha-sets A_small / A_cover,
the scales epsilon and delta, plus grid densities and search caps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .blinds import Caps
from .curve import CurveProfile, builtin_curve, builtin_curve_names
from .geometry import Point
from .measure import AlphaSet


class SceneError(ValueError):
    """Scene validation failure; message carries the offending field path."""


@dataclass(frozen=True)
class SceneSpec:
    schema_version: int
    scene_id: str
    curve_name: str
    curve_bounds: Optional[tuple[float, float]]
    y: Point
    subrange: tuple[float, float]
    a_small_components: tuple[tuple[float, float], ...]
    a_cover_component: tuple[float, float]
    epsilon: float
    delta: float
    alpha_points: int = 200
    segment_points: int = 33
    caps: Caps = field(default_factory=Caps)
    seed: int = 0

    def curve(self) -> CurveProfile:
        return builtin_curve(self.curve_name, self.curve_bounds)

    def a_small(self) -> AlphaSet:
        return AlphaSet.from_intervals(self.a_small_components, self.alpha_points)

    def a_cover(self) -> AlphaSet:
        return AlphaSet.from_intervals([self.a_cover_component], self.alpha_points)

    def to_json_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "scene_id": self.scene_id,
            "curve": {"name": self.curve_name},
            "y": [self.y.x1, self.y.x2],
            "subrange": list(self.subrange),
            "A_small": [list(c) for c in self.a_small_components],
            "A_cover": list(self.a_cover_component),
            "epsilon": self.epsilon,
            "delta": self.delta,
            "grids": {
                "alpha_points": self.alpha_points,
                "segment_points": self.segment_points,
            },
            "caps": {"N_max": self.caps.n_max, "m_max": self.caps.m_max},
            "seed": self.seed,
        }
        if self.curve_bounds is not None:
            out["curve"]["bounds"] = list(self.curve_bounds)
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "SceneSpec":
        def fail(path: str, msg: str) -> SceneError:
            return SceneError(f"{path}: {msg}")

        def need(path: str, *keys):
            node = data
            for key in path.split(".") if path else []:
                if not isinstance(node, dict) or key not in node:
                    raise fail(path, "missing field")
                node = node[key]
            return node

        def pair(path: str) -> tuple[float, float]:
            v = need(path)
            if not (isinstance(v, (list, tuple)) and len(v) == 2):
                raise fail(path, "expected a [lo, hi] pair")
            lo, hi = float(v[0]), float(v[1])
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise fail(path, "entries must be finite")
            return lo, hi

        version = int(need("schema_version"))
        if version != 1:
            raise fail("schema_version", f"unsupported version {version}")
        curve_node = need("curve")
        name = curve_node.get("name")
        if name not in builtin_curve_names():
            raise fail("curve.name", f"unknown curve {name!r}")
        bounds = None
        if "bounds" in curve_node:
            b = curve_node["bounds"]
            if not (isinstance(b, (list, tuple)) and len(b) == 2 and b[0] < b[1]):
                raise fail("curve.bounds", "expected [a, b] with a < b")
            bounds = (float(b[0]), float(b[1]))
        y_lo, y_hi = pair("y")
        sub = pair("subrange")
        if not sub[0] < sub[1]:
            raise fail("subrange", "expected a' < b'")
        small_raw = need("A_small")
        if not (isinstance(small_raw, list) and small_raw):
            raise fail("A_small", "expected a nonempty list of intervals")
        small = []
        for i, comp in enumerate(small_raw):
            if not (isinstance(comp, (list, tuple)) and len(comp) == 2 and comp[0] <= comp[1]):
                raise fail(f"A_small[{i}]", "expected [lo, hi] with lo <= hi")
            small.append((float(comp[0]), float(comp[1])))
        small.sort()
        cover = pair("A_cover")
        if cover[0] > cover[1]:
            raise fail("A_cover", "expected lo <= hi")
        for i, (slo, shi) in enumerate(small):
            if not (shi < cover[0] or cover[1] < slo):
                raise fail(f"A_small[{i}]", "overlaps A_cover")
        for (p_lo, p_hi), (q_lo, q_hi) in zip(small, small[1:]):
            if q_lo <= p_hi:
                raise fail("A_small", "components overlap")
        if not any(lo <= y_lo <= hi for lo, hi in small):
            raise fail("y", f"y.x1={y_lo!r} must lie in some A_small component")
        epsilon = float(need("epsilon"))
        delta = float(need("delta"))
        if epsilon <= 0.0:
            raise fail("epsilon", "must be positive")
        if delta <= 0.0:
            raise fail("delta", "must be positive")
        grids = data.get("grids", {})
        caps_node = data.get("caps", {})
        return cls(
            schema_version=version,
            scene_id=str(data.get("scene_id", "scene")),
            curve_name=name,
            curve_bounds=bounds,
            y=Point(y_lo, y_hi),
            subrange=sub,
            a_small_components=tuple(small),
            a_cover_component=cover,
            epsilon=epsilon,
            delta=delta,
            alpha_points=int(grids.get("alpha_points", 200)),
            segment_points=int(grids.get("segment_points", 33)),
            caps=Caps(
                n_max=int(caps_node.get("N_max", Caps.n_max)),
                m_max=int(caps_node.get("m_max", Caps.m_max)),
            ),
            seed=int(data.get("seed", 0)),
        )


BUNDLED_SCENES = ("Q1", "P1", "E1")


def load_scene(source: str | Path) -> SceneSpec:
    """Load a scene by bundled name (Q1/P1/E1) or from a JSON file path."""
    name = str(source)
    if name in BUNDLED_SCENES:
        text = (
            resources.files("curveblinds").joinpath(f"scenes/{name.lower()}.json")
        ).read_text()
    else:
        path = Path(source)
        if not path.exists():
            raise SceneError(f"scene {name!r} is neither bundled nor an existing file")
        text = path.read_text()
    return SceneSpec.from_json_dict(json.loads(text))
