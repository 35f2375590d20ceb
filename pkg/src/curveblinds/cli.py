"""Command-line entry point: construct, render, checks, duality.

All outputs (blindset.json, report.json, figure.svg) are deterministic
functions of the scene inputs; JSON is written with sorted keys and stable
float formatting so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .blinds import BlindSet, BranchTree, ConstructionError, iter_vb, vb
from .curve import builtin_curve, diff_interval, project_disk
from .duality import LineParam, similarity_residual
from .geometry import Disk, Point, Segment
from .keylemma import key_construction
from .measure import FiberArc
from .projline import CCW, angle_schedule, dist
from .render import render_svg
from .scene import SceneError, SceneSpec, load_scene
from .verify import check_cover, check_small, gradient_check, law_of_sines_check

CHECK_SUITES = ("rotation", "projection", "duality", "all")


def _dump_json(data: dict, path: Path) -> None:
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _rigorous_pad(spec: SceneSpec, shift: float) -> float:
    """Subrange extension creating covering slack of at least 2*shift.

    The projected fiber-arc endpoint at parameter t moves under d(t) at rate
    |f'(alpha - y1 + t) - f'(t)|; padding by 2*shift over the slowest rate
    observed on the alpha-grid leaves room to erode the covering later.
    """
    curve = spec.curve()
    y1 = spec.y.x1
    slowest = math.inf
    for alpha in spec.a_cover().grid():
        for t in spec.subrange:
            rate = abs(
                curve.df(curve.clamp_t(float(alpha) - y1 + t))
                - curve.df(curve.clamp_t(t))
            )
            slowest = min(slowest, rate)
    if not math.isfinite(slowest) or slowest <= 0.0:
        raise ValueError("cannot pad subrange: projected endpoints are stationary")
    return 3.0 * shift / slowest


def run_construct(
    spec: SceneSpec, out_dir: Path, rigorous: bool = False
) -> tuple[dict, dict]:
    """Run the key construction for a scene; write blindset.json, report.json."""
    out_dir.mkdir(parents=True, exist_ok=True)
    curve = spec.curve()
    subrange = spec.subrange
    shift = 0.0
    if rigorous:
        shift = curve.df_bound * spec.a_cover().grid_step / 2.0
        pad = _rigorous_pad(spec, shift)
        subrange = (
            max(curve.a, subrange[0] - pad),
            min(curve.b, subrange[1] + pad),
        )
    start = time.perf_counter()
    result = key_construction(
        curve,
        spec.y,
        subrange,
        spec.a_small(),
        spec.a_cover(),
        spec.epsilon,
        spec.delta,
        caps=spec.caps,
        segment_points=spec.segment_points,
        scene_id=spec.scene_id,
    )
    elapsed = time.perf_counter() - start
    cover_report = result.cover_report
    small_report = result.small_report
    if rigorous:
        # re-certify covering of the original (unpadded) arc between grid
        # points: erode the blinds' projection and inflate the target by the
        # worst endpoint motion over half a grid step
        arc = FiberArc(spec.y, spec.subrange[0], spec.subrange[1])
        cover_report = check_cover(
            curve,
            result.blinds,
            arc,
            spec.a_cover(),
            margin=1e-9,
            scene_id=spec.scene_id,
            shift=shift,
        )
        a_small = spec.a_small()
        small_report = check_small(
            curve,
            result.blinds,
            a_small,
            bound=spec.epsilon,
            scene_id=spec.scene_id,
            shift=curve.df_bound * a_small.grid_step / 2.0,
        )
    passed = cover_report.passed and small_report.passed
    if rigorous:
        passed = passed and cover_report.padding > 0.0 and small_report.padding > 0.0
    blind_json = result.blinds.to_json_dict()
    blind_json["scene"] = spec.to_json_dict()
    report = {
        "scene_id": spec.scene_id,
        "pass": passed,
        "rigorous": rigorous,
        "pieces": len(result.blinds),
        "total_length": result.blinds.total_length,
        "eps_used": result.eps_used,
        "delta_used": result.delta_used,
        "cover": cover_report.to_json_dict(),
        "small": small_report.to_json_dict(),
    }
    _dump_json(blind_json, out_dir / "blindset.json")
    _dump_json(report, out_dir / "report.json")
    report["elapsed_seconds"] = round(elapsed, 3)
    return blind_json, report


def run_render(spec: SceneSpec, blindset_path: Path, out_path: Path) -> str:
    """Render a constructed blind set (with its fiber arc) to an SVG file."""
    data = json.loads(blindset_path.read_text())
    blinds = BlindSet.from_json_dict(data)
    if len(blinds) == 0:
        raise ValueError("blind set is empty; nothing to render")
    curve = spec.curve()
    arc = FiberArc(spec.y, spec.subrange[0], spec.subrange[1])
    alpha = sum(spec.a_cover_component) / 2.0
    svg = render_svg(curve, blinds, arc=arc, alpha=alpha, title=spec.scene_id)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(svg)
    return svg


def _rotation_suite() -> list[tuple[str, bool, float, float]]:
    results = []
    worst = law_of_sines_check(trials=1000, seed=0)
    results.append(("law_of_sines_residual", worst < 1e-10, worst, 1e-10))

    # length of a divided-and-rotated family must not depend on the division
    seg = Segment(Point(0.0, 0.0), Point(1.0, 0.3))
    base = vb(seg, 1.2, 2.1, 1).total_length
    worst_len = max(
        abs(vb(seg, 1.2, 2.1, n).total_length - base) for n in (2, 3, 10, 100)
    )
    results.append(("divide_rotate_length_residual", worst_len < 1e-10, worst_len, 1e-10))

    # iterated construction: per-level length sums follow the sine ratios
    worst_tel = 0.0
    rng = np.random.default_rng(1)
    for _ in range(10):
        theta0 = float(rng.uniform(0.3, 0.6))
        theta_small = float(rng.uniform(1.4, 1.8))
        theta_cover = float(rng.uniform(2.4, 2.8))
        m = int(rng.integers(2, 5))
        tree = BranchTree.uniform(m, int(rng.integers(1, 4)))
        blinds = iter_vb(seg, theta_small, theta_cover, tree, chirality=CCW)
        schedule = angle_schedule(seg.direction, theta_small, m, CCW)
        by_level: dict[int, float] = {}
        for piece, idx in zip(blinds.segments, blinds.provenance):
            by_level[len(idx)] = by_level.get(len(idx), 0.0) + piece.length
        for level, total in by_level.items():
            expected = (
                math.sin(dist(schedule[0], theta_cover))
                / math.sin(dist(schedule[level], theta_cover))
                * seg.length
            )
            worst_tel = max(worst_tel, abs(total - expected))
    results.append(("iterated_level_length_residual", worst_tel < 1e-10, worst_tel, 1e-10))
    return results


def _projection_suite() -> list[tuple[str, bool, float, float]]:
    results = []
    worst_grad = max(
        gradient_check(builtin_curve(name), samples=300, seed=0)
        for name in ("parabola", "quarter_circle", "exp")
    )
    results.append(("gradient_residual", worst_grad < 1e-5, worst_grad, 1e-5))

    curve = builtin_curve("parabola")
    subrange = (0.1, 0.9)
    worst_diff = 0.0
    ok_bound = True
    for s in np.linspace(-0.9, 0.9, 201):
        lo, hi = diff_interval(curve, subrange, float(s))
        width = hi - lo
        if width > curve.df_bound * abs(float(s)) + 1e-12:
            ok_bound = False
        worst_diff = max(worst_diff, width - curve.df_bound * abs(float(s)))
    for s_deg in (-0.9, 0.0, 0.9):  # extreme and zero shifts collapse I_s
        lo, hi = diff_interval(curve, subrange, s_deg)
        worst_diff = max(worst_diff, hi - lo)
        ok_bound = ok_bound and hi - lo < 1e-10
    results.append(("difference_interval_bound", ok_bound, worst_diff, 0.0))

    disk = Disk(Point(0.5, 0.2), 0.3)
    ok_disk = True
    for alpha in np.linspace(0.3, 1.2, 7):
        bot, top = project_disk(curve, float(alpha), disk)
        ok_disk = ok_disk and top > bot
    results.append(("disk_projection_interval", ok_disk, 0.0, 0.0))
    return results


def _duality_suite() -> list[tuple[str, bool, float, float]]:
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        p = LineParam(float(rng.uniform(-5, 5)), float(rng.uniform(-5, 5)))
        c = float(rng.uniform(-10, 10))
        worst = max(worst, similarity_residual(p, c))
    return [("similarity_residual", worst < 1e-12, worst, 1e-12)]


def run_checks(suite: str) -> tuple[bool, list[str]]:
    """Run an invariant battery; returns (all passed, summary lines)."""
    if suite not in CHECK_SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {CHECK_SUITES}")
    batteries = {
        "rotation": _rotation_suite,
        "projection": _projection_suite,
        "duality": _duality_suite,
    }
    names = [s for s in ("rotation", "projection", "duality") if suite in ("all", s)]
    lines = []
    all_ok = True
    for name in names:
        for label, ok, value, bound in batteries[name]():
            all_ok &= ok
            verdict = "PASS" if ok else "FAIL"
            lines.append(f"{verdict} {name}/{label}: value={value:.3e} bound={bound:.1e}")
    return all_ok, lines


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="curveblinds",
        description="Constructions and certificates for curve-translate projections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_con = sub.add_parser("construct", help="run the key construction for a scene")
    p_con.add_argument("--scene", required=True, help="bundled scene id or JSON path")
    p_con.add_argument("--out", default="out", help="output directory")
    p_con.add_argument("--grid-alpha", type=int, default=None, help="alpha grid points")
    p_con.add_argument("--seed", type=int, default=None, help="override scene seed")
    p_con.add_argument("--rigorous", action="store_true", help="require grid padding")

    p_ren = sub.add_parser("render", help="render a constructed blind set to SVG")
    p_ren.add_argument("--scene", required=True)
    p_ren.add_argument("--blindset", default=None, help="path to blindset.json")
    p_ren.add_argument("--out", default="figure.svg", help="output SVG path")

    p_chk = sub.add_parser("checks", help="run invariant batteries")
    p_chk.add_argument("suite", choices=CHECK_SUITES)

    p_dua = sub.add_parser("duality", help="run the duality residual sweep")

    args = parser.parse_args(argv)
    try:
        if args.command == "construct":
            spec = load_scene(args.scene)
            overrides = {}
            if args.grid_alpha is not None:
                overrides["alpha_points"] = args.grid_alpha
            if args.seed is not None:
                overrides["seed"] = args.seed
            if overrides:
                spec = dataclasses.replace(spec, **overrides)
            _, report = run_construct(spec, Path(args.out), rigorous=args.rigorous)
            print(
                f"{'PASS' if report['pass'] else 'FAIL'} construct [{spec.scene_id}]: "
                f"{report['pieces']} pieces in {report['elapsed_seconds']}s"
            )
            return 0 if report["pass"] else 1
        if args.command == "render":
            spec = load_scene(args.scene)
            blindset = Path(args.blindset or Path("out") / "blindset.json")
            out_path = Path(args.out)
            run_render(spec, blindset, out_path)
            print(f"wrote {out_path}")
            return 0
        if args.command == "checks":
            ok, lines = run_checks(args.suite)
            print("\n".join(lines))
            return 0 if ok else 1
        if args.command == "duality":
            ok, lines = run_checks("duality")
            print("\n".join(lines))
            return 0 if ok else 1
    except (SceneError, ConstructionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
