"""End-to-end checks of the command line front end."""

import json
import math

import pytest

from subfinsler.cli import ScenarioError, load_scenario, main


def run(*argv):
    return main([str(a) for a in argv])


def read_json(path):
    return json.loads(path.read_text())


# -- scenario loading ----------------------------------------------------------


def test_bundled_names_resolve_without_suffix():
    cfg = load_scenario("abelian_l1")
    assert cfg.name == "abelian_l1"
    assert cfg.group == "translation2"
    assert cfg.norm["family"] == "l1"


def test_explicit_path_loads(tmp_path):
    src = tmp_path / "run.json"
    src.write_text(json.dumps({
        "name": "tiny", "group": "translation2",
        "norm": {"family": "l1", "dim": 2}, "covector": [1.0, 0.25]}))
    cfg = load_scenario(str(src))
    assert cfg.name == "tiny"
    assert cfg.step == 1e-3  # default


def test_load_rejects_unknown_keys(tmp_path):
    src = tmp_path / "bad.json"
    src.write_text(json.dumps({
        "name": "x", "group": "translation2",
        "norm": {"family": "l1", "dim": 2}, "stepp": 0.1}))
    with pytest.raises(ScenarioError, match="stepp"):
        load_scenario(str(src))


def test_load_rejects_missing_required_key(tmp_path):
    src = tmp_path / "bad.json"
    src.write_text(json.dumps({"name": "x", "group": "translation2"}))
    with pytest.raises(ScenarioError, match="norm"):
        load_scenario(str(src))


# -- happy paths per subcommand ------------------------------------------------


def test_integrate_writes_csv_and_meta(tmp_path):
    code = run("integrate", "--config", "abelian_l1", "--out", tmp_path,
               "--quiet")
    assert code == 0
    csv = tmp_path / "abelian_l1_trajectory.csv"
    assert csv.exists()
    header = csv.read_text().splitlines()[0].split(",")
    assert header[0] == "t"
    assert header[-1] == "face_id"
    meta = read_json(tmp_path / "abelian_l1_meta.json")
    assert meta["group"] == "translation2"
    assert meta["speed"] == 1.0  # max norm of the covector
    assert meta["events"] == []
    assert meta["speed_check"]["ok"] is True
    assert meta["seed"] == 0


def test_integrate_overrides_step_and_seed(tmp_path):
    code = run("integrate", "--config", "abelian_l1", "--out", tmp_path,
               "--step", "0.25", "--seed", "7", "--quiet")
    assert code == 0
    meta = read_json(tmp_path / "abelian_l1_meta.json")
    assert meta["step"] == 0.25
    assert meta["seed"] == 7
    rows = (tmp_path / "abelian_l1_trajectory.csv").read_text().splitlines()
    assert len(rows) == 1 + 5  # header plus nodes 0, 0.25, ..., 1.0


def test_branch_two_covectors(tmp_path):
    code = run("branch", "--config", "affine_corner_pair", "--out", tmp_path,
               "--step", "0.005", "--quiet")
    assert code == 0
    assert (tmp_path / "affine_corner_pair_trajectory_a.csv").exists()
    assert (tmp_path / "affine_corner_pair_trajectory_b.csv").exists()
    report = read_json(tmp_path / "affine_corner_pair_branch.json")
    assert report["scenario"] == "affine_corner_pair"
    assert report["branched"] is True
    assert abs(report["coincidence_time"] - math.log(2.0)) < 5e-2
    assert report["witness_time"] > report["coincidence_time"]


def test_branch_against_subgroup(tmp_path):
    code = run("branch", "--config", "affine_corner_half", "--out", tmp_path,
               "--step", "0.005", "--quiet")
    assert code == 0
    report = read_json(tmp_path / "affine_corner_half_branch.json")
    assert report["branched"] is True
    assert abs(report["coincidence_time"] - math.log(2.0)) < 5e-2


def test_certify_full_pipeline(tmp_path):
    code = run("certify", "--config", "heisenberg_finsler_certify",
               "--out", tmp_path, "--quiet")
    assert code == 0
    cert = read_json(tmp_path / "heisenberg_finsler_certify_certificate.json")
    assert cert["verdict"] is True
    assert cert["kind"] == "face-stability"
    assert cert["window"] == pytest.approx(1.0, abs=1e-9)
    assert cert["delta"] == pytest.approx(2.0, abs=1e-9)
    assert cert["m"]["method"] == "analytic-central"


def test_certify_abelianized_variant(tmp_path):
    code = run("certify", "--config", "heisenberg_carnot", "--out", tmp_path,
               "--quiet")
    assert code == 0
    cert = read_json(tmp_path / "heisenberg_carnot_certificate.json")
    assert cert["kind"] == "abelianized-minimality"
    assert cert["verdict"] is True
    assert cert["window"] == pytest.approx(0.625, abs=1e-9)


def test_shortcut_outputs(tmp_path):
    code = run("shortcut", "--config", "heisenberg_shortcut",
               "--out", tmp_path, "--quiet")
    assert code == 0
    summary = read_json(tmp_path / "heisenberg_shortcut_shortcut.json")
    assert summary["beta"] == pytest.approx(1.0, abs=1e-12)
    assert summary["length"] == pytest.approx(4.0, abs=1e-12)
    assert summary["endpoint_gap"] <= 1e-10
    csv = tmp_path / "heisenberg_shortcut_shortcut.csv"
    assert csv.read_text().splitlines()[0] == "t,x1,x2,x3"


def test_faces_outputs(tmp_path):
    code = run("faces", "--config", "hexagon_faces", "--out", tmp_path,
               "--quiet")
    assert code == 0
    payload = read_json(tmp_path / "hexagon_faces_faces.json")
    assert len(payload["faces"]) == 12
    dims = sorted(f["dim"] for f in payload["faces"])
    assert dims == [0] * 6 + [1] * 6
    assert payload["covering"]["delta"] == pytest.approx(1.0, abs=1e-9)


# -- exit codes ------------------------------------------------------------------


def test_missing_config_exits_2(tmp_path, capsys):
    code = run("integrate", "--config", tmp_path / "nope.json",
               "--out", tmp_path)
    assert code == 2
    assert "configuration error" in capsys.readouterr().err


def test_malformed_json_exits_2(tmp_path, capsys):
    src = tmp_path / "broken.json"
    src.write_text("{not json")
    code = run("integrate", "--config", src, "--out", tmp_path)
    assert code == 2
    assert "configuration error" in capsys.readouterr().err


def test_unknown_scenario_key_exits_2(tmp_path, capsys):
    src = tmp_path / "extra.json"
    src.write_text(json.dumps({
        "name": "x", "group": "translation2",
        "norm": {"family": "l1", "dim": 2}, "covector": [1, 0],
        "mystery": True}))
    code = run("integrate", "--config", src, "--out", tmp_path)
    assert code == 2
    assert "mystery" in capsys.readouterr().err


def test_bad_norm_family_exits_2(tmp_path, capsys):
    src = tmp_path / "norm.json"
    src.write_text(json.dumps({
        "name": "x", "group": "translation2",
        "norm": {"family": "octagonish", "dim": 2}, "covector": [1, 0]}))
    code = run("integrate", "--config", src, "--out", tmp_path)
    assert code == 2
    assert "bad norm spec" in capsys.readouterr().err


def test_branch_without_partner_exits_2(tmp_path, capsys):
    src = tmp_path / "lonely.json"
    src.write_text(json.dumps({
        "name": "lonely", "group": "translation2",
        "norm": {"family": "l1", "dim": 2}, "covector": [1.0, 0.25],
        "t_end": 0.5, "step": 0.1}))
    code = run("branch", "--config", src, "--out", tmp_path)
    assert code == 2
    assert "covector_b or reference_direction" in capsys.readouterr().err


def test_degenerate_covector_exits_3(tmp_path, capsys):
    # Covector vanishing on the polarization: no admissible control.
    src = tmp_path / "degenerate.json"
    src.write_text(json.dumps({
        "name": "degenerate", "group": "heisenberg",
        "norm": {"family": "linf", "dim": 2}, "polarization": [0, 1],
        "covector": [0.0, 0.0, 1.0], "t_end": 1.0, "step": 0.01}))
    code = run("integrate", "--config", src, "--out", tmp_path)
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_wrong_covector_length_exits_2(tmp_path, capsys):
    src = tmp_path / "short.json"
    src.write_text(json.dumps({
        "name": "short", "group": "heisenberg",
        "norm": {"family": "linf", "dim": 3}, "covector": [1.0, 2.0]}))
    code = run("integrate", "--config", src, "--out", tmp_path)
    assert code == 2
    assert "3 coordinates" in capsys.readouterr().err


# -- determinism ------------------------------------------------------------------


def test_rerun_is_byte_identical(tmp_path):
    dir_a = tmp_path / "a"
    dir_b = tmp_path / "b"
    for where in (dir_a, dir_b):
        assert run("integrate", "--config", "heisenberg_vertical",
                   "--out", where, "--quiet") == 0
    for fname in ("heisenberg_vertical_trajectory.csv",
                  "heisenberg_vertical_meta.json"):
        assert (dir_a / fname).read_bytes() == (dir_b / fname).read_bytes()
