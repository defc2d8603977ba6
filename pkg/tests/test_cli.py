"""Command-line surface: payloads, formats, config handling, exit codes."""

import json
import math
import os
import xml.etree.ElementTree as ET

import pytest

from so4lab import DEFAULT_CONSTANTS
from so4lab.cli import ConfigError, main, parse_config

A = DEFAULT_CONSTANTS.a


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_spectrum_json(capsys):
    code, out = _run(capsys, ["spectrum", "--n-max", "3"])
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "so4lab/1"
    assert payload["columns"] == ["n", "j", "label", "energy_over_m", "binding_hz", "degeneracy"]
    assert len(payload["rows"]) == 9
    first = payload["rows"][0]
    assert first[2] == "1S1/2"
    assert abs(first[3] - math.sqrt(1.0 - A * A)) < 1e-15
    assert first[4] > 0.0  # binding quoted as a positive frequency
    assert first[5] == 2


def test_spectrum_j_filter(capsys):
    code, out = _run(capsys, ["spectrum", "--n-max", "3", "--j", "2.5"])
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r[2] for r in rows] == ["3D5/2"]


def test_spectrum_csv_shape(capsys):
    code, out = _run(capsys, ["spectrum", "--n-max", "2", "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,j,label,energy_over_m,binding_hz,degeneracy"
    assert len(lines) == 1 + 4


def test_flags_accepted_on_either_side(capsys):
    code1, out1 = _run(capsys, ["--format", "csv", "spectrum", "--n-max", "1"])
    code2, out2 = _run(capsys, ["spectrum", "--n-max", "1", "--format", "csv"])
    assert code1 == code2 == 0
    assert out1 == out2


def test_spectrum_rejects_empty_request(capsys):
    code = main(["spectrum", "--n-max", "0"])
    assert code == 2


def test_depressions_values(capsys):
    code, out = _run(capsys, ["depressions", "--n-max", "3", "--q", "0.5"])
    assert code == 0
    payload = json.loads(out)
    rows = {(r[0], r[1]): r for r in payload["rows"]}
    assert abs(rows[(1, 0.5)][4] - 1.098e15) / 1.098e15 < 5e-3
    assert abs(rows[(2, 0.5)][4] - 1.225e14) / 1.225e14 < 5e-3
    assert payload["meta"]["skipped_levels"] == 0


def test_depressions_skips_blocked_levels(capsys):
    # q = 1 removes every j = 1/2 level (needs j + 1/2 > |q|)
    code, out = _run(capsys, ["depressions", "--n-max", "3", "--q", "1.0"])
    assert code == 0
    payload = json.loads(out)
    assert payload["meta"]["skipped_levels"] == 3
    assert all(r[1] >= 1.5 for r in payload["rows"])


def test_radial_normalized_dump(capsys):
    code, out = _run(capsys, ["radial", "--n", "1", "--j", "0.5", "--kappa-sign", "-1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["columns"] == ["r", "f", "g", "cumulative_norm"]
    assert abs(payload["meta"]["b_overlap"] - A) < 1e-10
    assert payload["rows"][-1][3] == pytest.approx(1.0, abs=1e-10)


def test_radial_csv_footer(capsys):
    code, out = _run(capsys, ["radial", "--n", "1", "--j", "0.5",
                              "--kappa-sign", "-1", "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[-2].startswith("# b = ")
    assert lines[-1].startswith("# norm = ")
    assert float(lines[-2].split("=")[1]) == pytest.approx(A, abs=1e-10)


def test_levels_svg_well_formed(capsys):
    code, out = _run(capsys, ["levels-svg", "--n-max", "3", "--q", "0.5"])
    assert code == 0
    root = ET.fromstring(out)
    assert root.tag.endswith("svg")
    text = out
    # six (n, j) levels below n = 3, each drawn in the point-charge column
    assert text.count("n=1") >= 1 and text.count("n=3") >= 3


def test_levels_svg_rejects_other_formats(capsys):
    assert main(["levels-svg", "--n-max", "2", "--q", "0.5", "--format", "json"]) == 2


def test_config_parsing(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(
        "# comment line\n"
        "grid_coarse = 400\n"
        "grid_fine = 800\n"
        "include_delta = off\n"
        "tol.commutator_H_D = 1e-10\n"
    )
    cfg = parse_config(str(p))
    assert cfg.grid_coarse == 400
    assert cfg.grid_fine == 800
    assert cfg.include_delta is False
    assert cfg.tolerances["commutator_H_D"] == 1e-10


def test_config_strict_errors(tmp_path):
    cases = {
        "bad_key.cfg": ("grid_coarsest = 400\n", "unknown config key 'grid_coarsest'"),
        "bad_tol.cfg": ("tol.not_a_check = 1e-9\n", "unknown tolerance key"),
        "bad_val.cfg": ("grid_coarse = fast\n", "invalid value"),
        "bad_line.cfg": ("grid_coarse 400\n", "expected 'key = value'"),
        "bad_bool.cfg": ("include_delta = maybe\n", "expects a boolean"),
        "bad_stencil.cfg": ("delta_stencil = midpoint\n", "delta_stencil"),
    }
    for name, (body, fragment) in cases.items():
        p = tmp_path / name
        p.write_text(body)
        with pytest.raises(ConfigError, match=fragment.replace("'", ".")):
            parse_config(str(p))
        assert main(["spectrum", "--n-max", "1", "--config", str(p)]) == 2
    assert main(["spectrum", "--n-max", "1", "--config", str(tmp_path / "absent.cfg")]) == 2


def test_verify_writes_report_and_figure(tmp_path, capsys):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("grid_coarse = 600\ngrid_fine = 1200\nr_max_over_a = 140\n")
    out1 = tmp_path / "rep1.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out1)]) == 0
    capsys.readouterr()
    payload = json.loads(out1.read_text())
    assert payload["passed"] is True
    assert payload["meta"]["grids"] == [600, 1200]
    assert os.path.exists(tmp_path / "rep1.png")


def test_verify_exit_one_on_impossible_tolerance(tmp_path, capsys):
    cfg = tmp_path / "strict.cfg"
    cfg.write_text(
        "grid_coarse = 600\ngrid_fine = 1200\nr_max_over_a = 140\n"
        "tol.commutator_H_D = 1e-30\n"
    )
    out = tmp_path / "rep.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 1
    capsys.readouterr()
    payload = json.loads(out.read_text())
    assert payload["passed"] is False
    failed = [r for r in payload["rows"] if not r[3]]
    assert [r[0] for r in failed] == ["commutator_H_D"]


def test_breaking_exit_codes(tmp_path, capsys):
    on = tmp_path / "on.cfg"
    on.write_text("breaking_points = 1500\n")
    assert main(["breaking", "--config", str(on)]) == 0
    capsys.readouterr()
    off = tmp_path / "off.cfg"
    off.write_text(
        "breaking_points = 800\ninclude_delta = false\ninclude_spin_orbit = false\n"
    )
    assert main(["breaking", "--config", str(off)]) == 1
    capsys.readouterr()
