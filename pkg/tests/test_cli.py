import json
from io import StringIO

import pandas as pd
import pytest
from rich.console import Console

from core.errors import ConfigError
from core.lib.logger import RunLogger
from app.cli.config import build_config, parse_point, parse_range
from app.cli.plotdata import artifact_kind, emit_plotdata
from app.cli import runner
from app.cli.main import main
from app.curves import segment, write_csv


def _report(path):
    return json.loads(path.read_text())


def test_onewell_radial_ray(tmp_path):
    out, rep = tmp_path / "curve.csv", tmp_path / "report.json"
    argv = ["onewell", "--p0", "1,0", "--area", "0", "--out", str(out), "--report", str(rep), "--quiet"]
    assert main(argv) == 0
    report = _report(rep)
    assert report["status"] == "ok"
    assert report["command"] == "onewell"
    assert report["result"]["energy"] == pytest.approx(0.5, abs=1e-12)
    assert report["result"]["C"] == 0.0
    first = rep.read_bytes(), out.read_bytes()

    assert main(argv) == 0
    assert (rep.read_bytes(), out.read_bytes()) == first


def test_onewell_at_the_well_is_a_numerical_failure(tmp_path):
    rep = tmp_path / "report.json"
    assert main(["onewell", "--p0", "0,0", "--out", str(tmp_path / "c.csv"), "--report", str(rep), "--quiet"]) == 3
    report = _report(rep)
    assert report["status"] == "error"
    assert report["error"] == "EmptyCurveError"


def test_spectrum_table_and_plotdata(tmp_path):
    out, rep = tmp_path / "regimes.csv", tmp_path / "report.json"
    assert main(["spectrum", "--nu", "0:0.5:4", "--out", str(out), "--report", str(rep), "--quiet"]) == 0
    table = pd.read_csv(out)
    assert len(table) == 10
    assert _report(rep)["result"]["max_cross_check"] <= 1e-10
    boundary = table[table["boundary"]]
    assert sorted(boundary["nu2"].round(9)) == [0.0, 8.0]
    regimes = table.set_index("nu")["regime"]
    assert regimes[0.0] == "real-decay"
    assert regimes[1.0] == "spiral-decay"
    assert regimes[4.0] == "oscillatory-no-wave"

    curve = tmp_path / "curve.csv"
    assert main(["onewell", "--p0", "1,0", "--area", "0.25", "--out", str(curve), "--quiet"]) == 0
    outdir = tmp_path / "plots"
    assert main(["plotdata", str(curve), str(out), "--outdir", str(outdir), "--quiet"]) == 0
    polar = pd.read_csv(outdir / "curve_curve.csv")
    assert {"r", "theta"} <= set(polar.columns)
    assert polar["r"].iloc[0] == pytest.approx(1.0)
    assert polar["r"].iloc[-1] == 0.0
    long = pd.read_csv(outdir / "regimes_regimes.csv")
    assert len(long) == 40
    assert (long.groupby("nu").size() == 4).all()


def test_nonexist_sequence(tmp_path):
    rep = tmp_path / "report.json"
    argv = ["nonexist", "--q", "2", "--area", "3.141592653589793", "--jmax", "100",
            "--out", str(tmp_path / "seq.csv"), "--report", str(rep), "--quiet"]
    assert main(argv) == 0
    result = _report(rep)["result"]
    assert result["monotone"] is True
    assert result["max_rel_error"] <= 1e-4
    assert result["last_energy"] > result["limit"] == pytest.approx(1.0 / 3.0)


def test_series_radial_error(tmp_path):
    rep, out = tmp_path / "report.json", tmp_path / "series.json"
    argv = ["series", "--coeffs", "0,0.5", "--beta", "1.2", "--degree", "10", "--radius", "0.05",
            "--out", str(out), "--report", str(rep), "--quiet"]
    assert main(argv) == 0
    result = _report(rep)["result"]
    assert result["radial_series_error"] <= 1e-10
    assert result["degree"] == 10
    assert set(json.loads(out.read_text())) >= {str(k) for k in range(3, 11)}


def test_wave_on_the_axis_heteroclinic(tmp_path, separable_json):
    curve = tmp_path / "axis.csv"
    write_csv(segment((-1.0, 0.0), (1.0, 0.0), 4001), curve)
    rep, out = tmp_path / "report.json", tmp_path / "profile.csv"
    argv = ["wave", "--curve", str(curve), "--potential", str(separable_json),
            "--out", str(out), "--report", str(rep), "--quiet"]
    assert main(argv) == 0
    result = _report(rep)["result"]
    assert abs(result["nu"]) <= 1e-9
    assert result["H_over_sqrt2E"] == pytest.approx(1.0, abs=1e-4)
    assert result["wells"] == [[-1.0, 0.0], [1.0, 0.0]]
    profile = pd.read_csv(out)
    assert list(profile.columns) == ["y", "U1", "U2", "equip_residual"]
    assert profile["y"].is_monotonic_increasing


def test_config_errors_exit_two(tmp_path, separable_json):
    assert main(["wave", "--curve", str(tmp_path / "missing.csv"), "--potential", str(separable_json),
                 "--quiet"]) == 2
    assert main(["twowell", "--potential", str(tmp_path / "missing.json"), "--quiet"]) == 2
    assert main(["wave", "--curve", str(tmp_path / "missing.csv"), "--quiet"]) == 2

    single = tmp_path / "single.json"
    single.write_text(json.dumps({"kind": "quadratic-one-well", "wells": [[0, 0]],
                                  "params": {"hessian": [[1, 0], [0, 1]]}}))
    rep = tmp_path / "report.json"
    assert main(["twowell", "--potential", str(single), "--report", str(rep), "--quiet"]) == 2
    assert _report(rep)["status"] == "error"


def test_build_config_rejects_unknown_params():
    with pytest.raises(ConfigError):
        build_config({"command": "onewell", "params": {"colour": "blue"}})
    with pytest.raises(ConfigError):
        build_config({"command": "onewell", "seed": -1})
    with pytest.raises(ConfigError):
        build_config({"command": "twowell"})


def test_run_config_file(tmp_path):
    out, rep = tmp_path / "regimes.csv", tmp_path / "report.json"
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "spectrum", "params": {"nu": [0.0, 1.0], "lambda2": 2.0},
                               "out": str(out), "report": str(rep), "verbose": False}))
    assert main(["--config", str(cfg)]) == 0
    result = _report(rep)["result"]
    assert result["rows"] == 2
    assert result["boundaries_nu2"] == pytest.approx([2.0, 18.0])


def test_parse_helpers():
    assert parse_range("0:0.5:1") == [0.0, 0.5, 1.0]
    assert parse_range("2.5") == [2.5]
    assert parse_point("1,-0.5") == (1.0, -0.5)
    for bad in ("1:0.5:0", "a", "1:2", "0:0:1"):
        with pytest.raises(ConfigError):
            parse_range(bad)
    with pytest.raises(ConfigError):
        parse_point("1")


def test_run_logger_renders_stages():
    buffer = StringIO()
    logger = RunLogger(console=Console(file=buffer, width=100))
    logger.log_run_start("onewell", {"area": 0.25})
    logger.log_stage("flow", {"E": 0.5}, 0.01)
    logger.log_final("ok", ["curve.csv"])
    text = buffer.getvalue()
    assert "isoflow onewell" in text
    assert "flow" in text
    assert "curve.csv" in text
    assert logger.stage_count == 1

    silent = StringIO()
    quiet = RunLogger(enabled=False, console=Console(file=silent))
    quiet.log_stage("flow", {"E": 0.5})
    assert silent.getvalue() == ""
    assert len(quiet.stages) == 1


def test_emit_plotdata_rejects_unknown_artifacts(tmp_path):
    odd = tmp_path / "odd.csv"
    odd.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        emit_plotdata([odd], tmp_path / "plots")
    with pytest.raises(ConfigError):
        emit_plotdata([tmp_path / "missing.csv"], tmp_path / "plots")
    assert artifact_kind(["j", "r", "energy", "closed_form", "momentum"]) == "nonexist"
    assert artifact_kind(["y", "U1", "U2", "equip_residual"]) == "profile"


def test_wave_tails_follow_the_estimated_speed(tmp_path, separable_json, monkeypatch):
    seen = []
    build = runner.to_profile

    def spy(curve, pot, nu=0.0, delta=None):
        seen.append(nu)
        return build(curve, pot, nu, delta)

    monkeypatch.setattr(runner, "to_profile", spy)
    monkeypatch.setattr(runner, "estimate_speed", lambda profile, pot: (0.3, 0.0))
    curve = tmp_path / "axis.csv"
    write_csv(segment((-1.0, 0.0), (1.0, 0.0), 401), curve)
    rep = tmp_path / "report.json"
    argv = ["wave", "--curve", str(curve), "--potential", str(separable_json),
            "--out", str(tmp_path / "profile.csv"), "--report", str(rep), "--quiet"]
    assert main(argv) == 0
    assert seen == [0.0, 0.3]
    assert _report(rep)["result"]["tail_nu"] == 0.3

    seen.clear()
    assert main(argv + ["--nu", "0.2"]) == 0
    assert seen == [0.2]
    assert _report(rep)["result"]["tail_nu"] == 0.2
