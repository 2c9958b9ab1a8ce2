import json
import math
import subprocess
import sys

import numpy as np
import pytest

import oracles
from inflated import formats
from inflated.cli import EXIT_FAILURE, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def data_rows(csv_text):
    lines = csv_text.splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    return body[0], [ln.split(",") for ln in body[1:]]


def preamble(csv_text):
    return dict(ln[2:].split("=", 1) for ln in csv_text.splitlines() if ln.startswith("# "))


class TestFormats:
    def test_fmt_has_17_significant_digits(self):
        assert formats.fmt(1.0) == "1.0000000000000000e+00"
        assert formats.fmt(-math.pi) == "-3.1415926535897931e+00"

    def test_csv(self):
        text = formats.render_csv(("a", "b"), [(1.5, 2), (float("nan"), True)], {"x": 0.25})
        assert text == ("# x=2.5000000000000000e-01\na,b\n"
                        "1.5000000000000000e+00,2\nnan,true\n")

    def test_csv_row_width_checked(self):
        with pytest.raises(ValueError):
            formats.render_csv(("a", "b"), [(1.0,)])

    def test_json_round_trips_through_stdlib(self):
        doc = {"params": {"a": 1.0, "name": 'q"\x01'}, "samples": [[1.0, 2.0]],
               "report": {"bad": float("inf")}, "residuals": {}}
        back = json.loads(formats.render_json(doc))
        assert back["params"] == {"a": 1.0, "name": 'q"\x01'}
        assert back["samples"] == [[1.0, 2.0]]
        assert back["report"]["bad"] is None

    def test_svg(self):
        square = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
        text = formats.render_svg([square])
        assert text.count("<polyline") == 1
        assert 'viewBox="0 0 1000 1000"' in text
        assert "20.000000,980.000000" in text and "980.000000,20.000000" in text


class TestMylarCommand:
    def test_rows(self, capsys):
        code, out, _ = run(capsys, "mylar", "--a", "1", "--samples", "100")
        assert code == EXIT_OK
        header, rows = data_rows(out)
        assert header == "t,k,kprime,x,y,theta"
        assert len(rows) == 100
        assert float(rows[-1][1]) == pytest.approx(-2.0)
        assert float(rows[-1][0]) == pytest.approx(oracles.FLAT_RADIUS_UNIT, abs=1e-12)
        assert float(rows[0][4]) == pytest.approx(oracles.HEIGHT_UNIT, abs=1e-12)

    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "mylar", "--a", "1", "--format", "json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["report"]["volume"] == pytest.approx(2.745812, abs=1e-5)
        assert doc["report"]["a_over_r"] == pytest.approx(oracles.A_OVER_R, abs=1e-10)
        assert set(doc) == {"params", "samples", "report", "residuals"}
        assert all(len(r) == 6 for r in doc["samples"])

    def test_svg(self, capsys):
        code, out, _ = run(capsys, "mylar", "--a", "1", "--format", "svg")
        assert code == EXIT_OK and out.count("<polyline") == 2

    @pytest.mark.parametrize("value", ["-1", "0", "nan", "x"])
    def test_bad_radius(self, capsys, value):
        assert run(capsys, "mylar", "--a", value)[0] == EXIT_USAGE

    def test_missing_radius(self, capsys):
        code, _, err = run(capsys, "mylar")
        assert code == EXIT_USAGE and "--a" in err


class TestTrajectoryCommands:
    def test_implicit_reaches_equator(self, capsys):
        code, out, _ = run(capsys, "implicit", "--lam", "0", "--mu", "16", "--L", "1.3110288")
        assert code == EXIT_OK
        _, rows = data_rows(out)
        assert float(rows[-1][1]) == pytest.approx(2.0, abs=1e-6)

    def test_implicit_without_branch(self, capsys):
        code, _, err = run(capsys, "implicit", "--lam", "0", "--mu", "-1", "--L", "1")
        assert code == EXIT_FAILURE and "NoBranchError" in err

    def test_solve_fixed_point(self, capsys):
        code, out, _ = run(capsys, "solve", "--k0", "1", "--kp0", "0", "--lam", "0.5", "--L", "2")
        assert code == EXIT_OK
        _, rows = data_rows(out)
        assert {float(r[1]) for r in rows} == {1.0}

    def test_solve_residuals_small(self, capsys):
        code, out, _ = run(capsys, "solve", "--k0", "0", "--kp0", "2", "--lam", "0", "--L", "1.3",
                           "--format", "json")
        assert code == EXIT_OK
        res = json.loads(out)["residuals"]
        assert max(v for v in res.values() if v is not None) <= 1e-7


class TestAssembleAndSweep:
    def test_mylar_section_closes(self, capsys):
        code, out, _ = run(capsys, "assemble", "--n-arcs", "2", "--L", "1.3110288",
                           "--target-angle", "0")
        assert code == EXIT_OK
        assert float(preamble(out)["residual_closure_gap"]) <= 1e-6

    def test_unreachable_angle(self, capsys):
        code, _, err = run(capsys, "assemble", "--L", "1", "--target-angle", "-1")
        assert code == EXIT_FAILURE and "achievable" in err

    def test_unreachable_pole_curvature(self, capsys):
        code, _, err = run(capsys, "assemble", "--L", "1", "--pole-curvature", "5")
        assert code == EXIT_FAILURE and "achievable" in err

    def test_target_required(self, capsys):
        assert run(capsys, "assemble", "--L", "1")[0] == EXIT_USAGE

    def test_sweep_rows(self, capsys):
        code, out, _ = run(capsys, "sweep", "--L", "1", "--nu-min", "0.5", "--nu-max", "2.5",
                           "--count", "5", "--workers", "2")
        assert code == EXIT_OK
        _, rows = data_rows(out)
        assert len(rows) == 5

    def test_sweep_svg_is_usage_error(self, capsys):
        assert run(capsys, "sweep", "--L", "1", "--nu", "1", "--format", "svg")[0] == EXIT_USAGE


class TestIOAndConfig:
    def test_files_are_byte_identical(self, tmp_path, capsys):
        outs = []
        for i in range(2):
            path = tmp_path / f"run{i}.csv"
            assert run(capsys, "assemble", "--L", "1", "--target-angle", "0.5",
                       "--out", str(path))[0] == EXIT_OK
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
        assert b"\r" not in outs[0]

    def test_unwritable_output(self, tmp_path, capsys):
        target = tmp_path / "missing" / "x.csv"
        assert run(capsys, "mylar", "--a", "1", "--out", str(target))[0] == EXIT_IO

    def test_config_then_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# balloon\na=2\nsamples=10\n")
        code, out, _ = run(capsys, "mylar", "--config", str(cfg))
        assert code == EXIT_OK
        assert float(preamble(out)["a"]) == 2.0
        assert len(data_rows(out)[1]) == 10
        code, out, _ = run(capsys, "mylar", "--config", str(cfg), "--a", "3")
        assert float(preamble(out)["a"]) == 3.0

    def test_config_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("radius=2\n")
        assert run(capsys, "mylar", "--config", str(cfg))[0] == EXIT_USAGE

    def test_config_missing_file(self, tmp_path, capsys):
        assert run(capsys, "mylar", "--config", str(tmp_path / "nope.cfg"))[0] == EXIT_IO

    def test_no_command(self, capsys):
        assert run(capsys)[0] == EXIT_USAGE


class TestValidate:
    def test_default_suite_passes(self, capsys):
        code, out, _ = run(capsys, "validate")
        lines = [ln for ln in out.splitlines() if ln.startswith(("PASS", "FAIL"))]
        assert code == EXIT_OK
        assert len(lines) >= 12
        assert all(ln.startswith("PASS") for ln in lines)

    def test_injected_fault_fails(self, capsys):
        code, out, _ = run(capsys, "validate", "--inject-fault")
        assert code == EXIT_FAILURE
        assert out.splitlines()[0].startswith("FAIL")


def test_module_entry_point(tmp_path):
    path = tmp_path / "m.json"
    proc = subprocess.run([sys.executable, "-m", "inflated", "mylar", "--a", "2", "--format",
                           "json", "--out", str(path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(path.read_text())["report"]["r"] == pytest.approx(
        2 * oracles.FLAT_RADIUS_UNIT, abs=1e-11)
