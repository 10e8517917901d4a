import csv
import json

import numpy as np
import pytest

from pulseforge.cli import COMPARE, main, read_pulses
from pulseforge.verify import SynthesisReport

WORKED = "J = 200\ngamma1 = pi/2\ngamma2 = 0\n"


def _run(tmp_path, text, *args, name="cfg.txt"):
    cfg = tmp_path / name
    cfg.write_text(text)
    out = tmp_path / "out"
    return main(["synth", "--config", str(cfg), "--out", str(out), *args]), out


def _plot(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_approximate_worked_example(tmp_path):
    code, out = _run(tmp_path, WORKED + "strategy = approximate\n", "--threshold", "0.99")
    assert code == 0
    d = read_pulses(out / "pulses.csv")
    t = d["t_s"]
    assert t[-1] == pytest.approx(np.pi / 100, rel=1e-15)
    assert np.allclose(d["omega1_rad_s"], 100 * np.cos(200 * t), atol=1e-9)
    assert np.all(d["omega2_rad_s"] == 0) and np.all(d["phi1_rad"] == 0)
    r = SynthesisReport.from_json((out / "report.json").read_text())
    assert r.fidelity == pytest.approx(0.9989877169444366, abs=1e-6)
    assert r.status == "ok" and r.parameters["units"] == "rad/s"


def test_threshold_exit_code(tmp_path):
    code, _ = _run(tmp_path, WORKED + "strategy = approximate\nthreshold = 0.9999\n")
    assert code == 1


def test_identity_target(tmp_path):
    code, out = _run(tmp_path, "J = 200\ngamma1 = 0\ngamma2 = 0\nstrategy = min-energy\n")
    assert code == 0
    r = json.loads((out / "report.json").read_text())
    assert r["fidelity"] == 1.0 and r["duration"] == 0.0 and r["stages"] == []
    assert (out / "pulses.csv").read_text().splitlines() == ["t_s,omega1_rad_s,omega2_rad_s,phi1_rad,phi2_rad"]


def test_min_energy_plot(tmp_path):
    code, out = _run(tmp_path, WORKED + "strategy = min-energy\n")
    assert code == 0
    rows = _plot(out / "plot.csv")
    assert {r["strategy"] for r in rows} == set(COMPARE["min-energy"])
    opt = np.array([float(r["omega1_rad_s"]) for r in rows if r["strategy"] == "optimized"])
    me = np.array([float(r["omega1_rad_s"]) for r in rows if r["strategy"] == "min-energy"])
    assert opt.shape == me.shape
    assert np.abs(opt - me).max() <= 10.0
    r = SynthesisReport.from_json((out / "report.json").read_text())
    assert r.fidelity >= 1 - 1e-4
    assert r.duration == pytest.approx(0.031911, rel=0.05)


def test_display_hz(tmp_path):
    code, out = _run(tmp_path, WORKED + "strategy = approximate\nthreshold = 0.9\n", "--display-hz")
    assert code == 0
    rows = _plot(out / "plot.csv")
    assert "omega1_hz" in rows[0]
    assert float(rows[0]["omega1_hz"]) == pytest.approx(100 / (2 * np.pi))


def test_deterministic_outputs(tmp_path):
    text = WORKED + "strategy = optimized\n"
    _, out = _run(tmp_path, text)
    first = {p: (out / p).read_bytes() for p in ("pulses.csv", "report.json", "plot.csv")}
    _, out = _run(tmp_path, text)
    assert {p: (out / p).read_bytes() for p in first} == first


def test_verify_subcommand(tmp_path, capsys):
    code, out = _run(tmp_path, WORKED + "strategy = approximate\nthreshold = 0.99\n")
    assert code == 0
    capsys.readouterr()
    code = main(["verify", "--config", str(tmp_path / "cfg.txt"), "--out", str(out)])
    assert code == 0
    res = json.loads(capsys.readouterr().out)
    assert res["fidelity"] == pytest.approx(0.9989877169444366, abs=1e-5)


def test_verify_bad_table(tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(WORKED)
    bad = tmp_path / "bad.csv"
    bad.write_text("t_s,omega1_rad_s,omega2_rad_s,phi1_rad,phi2_rad\n0,1,x,0,0\n")
    assert main(["verify", "--config", str(cfg), "--pulses", str(bad)]) == 2
    assert main(["verify", "--config", str(cfg), "--pulses", str(tmp_path / "missing.csv")]) == 2


def test_config_errors(tmp_path, capsys):
    code, _ = _run(tmp_path, "J = 200\ngamma1 = pi/\ngamma2 = 0\n")
    assert code == 2
    assert "line 2, field 'gamma1'" in capsys.readouterr().err
    assert main(["synth"]) == 2
    assert main(["synth", "--config", str(tmp_path / "nope.txt")]) == 2
    assert main(["bogus"]) == 2


def test_synthesis_failure_still_reports(tmp_path):
    code, out = _run(tmp_path, WORKED + "strategy = bang-bang\nomega_min = -1\nomega_max = 1\n")
    assert code == 3
    r = json.loads((out / "report.json").read_text())
    assert r["status"] == "synthesis-failure" and "error" in r["parameters"]


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6 and all(l.startswith("PASS") for l in lines)
