"""Command-line interface: construct, render, checks, duality, exit codes."""

import json

import pytest

from curveblinds.cli import main, run_checks, run_construct
from curveblinds.scene import load_scene


def test_construct_writes_outputs(tmp_path):
    code = main(["construct", "--scene", "Q1", "--out", str(tmp_path)])
    assert code == 0
    blindset = json.loads((tmp_path / "blindset.json").read_text())
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["pass"] is True
    assert report["scene_id"] == "Q1"
    assert report["pieces"] == len(blindset["segments"])
    assert blindset["scene"]["scene_id"] == "Q1"
    assert "elapsed_seconds" not in report  # timing must not break determinism
    assert report["cover"]["pass"] and report["small"]["pass"]


def test_construct_rigorous_reports_padding(tmp_path):
    code = main(["construct", "--scene", "Q1", "--out", str(tmp_path), "--rigorous"])
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["rigorous"] is True
    assert report["cover"]["padding"] > 0.0
    assert report["small"]["padding"] > 0.0


def test_construct_grid_alpha_override(tmp_path):
    spec = load_scene("Q1")
    _, report = run_construct(spec, tmp_path / "a")
    import dataclasses

    coarse = dataclasses.replace(spec, alpha_points=50)
    _, report2 = run_construct(coarse, tmp_path / "b")
    assert len(report["cover"]["per_alpha"]) > len(report2["cover"]["per_alpha"])


def test_construct_unknown_scene_exit_2(tmp_path, capsys):
    code = main(["construct", "--scene", "NOPE", "--out", str(tmp_path)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_render_produces_svg(tmp_path):
    assert main(["construct", "--scene", "Q1", "--out", str(tmp_path)]) == 0
    out = tmp_path / "figure.svg"
    code = main(
        [
            "render",
            "--scene",
            "Q1",
            "--blindset",
            str(tmp_path / "blindset.json"),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    svg = out.read_text()
    assert svg.startswith("<svg")
    assert "</svg>" in svg
    assert "<polyline" in svg


def test_render_missing_blindset_exit_2(tmp_path):
    code = main(
        [
            "render",
            "--scene",
            "Q1",
            "--blindset",
            str(tmp_path / "missing.json"),
            "--out",
            str(tmp_path / "f.svg"),
        ]
    )
    assert code == 2


def test_checks_suites_pass(capsys):
    for suite in ("rotation", "projection", "duality"):
        assert main(["checks", suite]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out


def test_checks_all_runs_every_battery(capsys):
    assert main(["checks", "all"]) == 0
    out = capsys.readouterr().out
    for name in ("rotation/", "projection/", "duality/"):
        assert name in out


def test_duality_subcommand(capsys):
    assert main(["duality"]) == 0
    assert "similarity_residual" in capsys.readouterr().out


def test_run_checks_rejects_unknown_suite():
    with pytest.raises(ValueError):
        run_checks("geometry")


def test_seed_override_recorded(tmp_path):
    code = main(
        ["construct", "--scene", "Q1", "--out", str(tmp_path), "--seed", "99"]
    )
    assert code == 0
    blindset = json.loads((tmp_path / "blindset.json").read_text())
    assert blindset["scene"]["seed"] == 99
