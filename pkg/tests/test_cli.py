import csv
import io
import json
import subprocess
import sys

import pytest

from pppm import cli
from pppm.detectors import QuadratureError
from pppm.svg import read_svg_series
from pppm.sweep import COLUMNS


def run(argv):
    try:
        return cli.main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


def rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_sweep_outputs(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["sweep", "--n", 4, 8, "--emin", 0.02, "--emax", 0.5, "--points", 4, "--out", out,
                "--svg", tmp_path / "s.svg"]) == 0
    assert out.read_text().splitlines()[0] == ",".join(COLUMNS)
    data = rows(out)
    assert len(data) == 8
    for r in data:
        assert float(r["r_pppm"]) >= float(r["r_hadamard"]) - 1e-12
    manifest = json.loads((tmp_path / "s.manifest.json").read_text())
    assert manifest["command"] == "sweep" and manifest["parameters"]["points"] == 4
    first = out.read_bytes()
    assert run(["sweep", "--n", 4, 8, "--emin", 0.02, "--emax", 0.5, "--points", 4, "--out", out]) == 0
    assert out.read_bytes() == first


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--emin", 0, "--points", 3],
        ["sweep", "--n", 6, "--points", 3],
        ["sweep", "--points", 1],
        ["simulate", "--p", 2],
        ["optimize-p", "--energy", 0.1],
        ["plot", "--input", "missing.csv", "--output", "x.svg"],
        ["nonsense"],
    ],
)
def test_usage_errors(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == 2


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("no convergence")

    monkeypatch.setattr(cli, "run_sweep", boom)
    assert run(["sweep", "--points", 2, "--out", tmp_path / "x.csv"]) == 3


def test_simulate_pass_and_fail(tmp_path):
    prefix = tmp_path / "sim"
    args = ["simulate", "--energy", 0.1, "--n", 4, "--trials", 50_000, "--steps", 2000, "--out-prefix", prefix]
    assert run(args) == 0
    report = (tmp_path / "sim_report.txt").read_text()
    assert "result: PASS" in report
    first = report
    assert run(args) == 0
    assert (tmp_path / "sim_report.txt").read_text() == first
    counts = rows(tmp_path / "sim_counts.csv")
    assert sum(int(r["count"]) for r in counts) == 50_000
    manifest = json.loads((tmp_path / "sim.manifest.json").read_text())
    assert manifest["config"]["trials"] == 50_000
    assert run(args + ["--threshold", 0.01]) == 4


def test_simulate_zero_energy(tmp_path):
    assert run(["simulate", "--energy", 0, "--n", 4, "--trials", 1000, "--steps", 100,
                "--out-prefix", tmp_path / "z"]) == 0
    counts = rows(tmp_path / "z_counts.csv")
    assert {r["outcome_id"] for r in counts} == {str(2 * 4 + 5 * 6)}


def test_plot_round_trip(tmp_path):
    src = tmp_path / "two.csv"
    assert run(["sweep", "--n", 4, "--emin", 0.05, "--emax", 0.2, "--points", 2, "--out", src]) == 0
    svg = tmp_path / "p.svg"
    pts = tmp_path / "p.csv"
    assert run(["plot", "--input", src, "--output", svg, "--columns", "r_dolinar,r_pppm", "--points-out", pts]) == 0
    text = svg.read_text()
    assert text.count("<polyline") == 2
    series = read_svg_series(text)
    data = rows(src)
    assert series["r_pppm"][1] == [float(r["r_pppm"]) for r in data]
    back = rows(pts)
    assert [r["y"] for r in back if r["series"] == "r_dolinar"] == [r["r_dolinar"] for r in data]
    before = svg.read_bytes()
    assert run(["plot", "--input", src, "--output", svg, "--columns", "r_dolinar,r_pppm", "--points-out", pts]) == 0
    assert svg.read_bytes() == before


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("points = 3\nn = 4 8\nemin = 0.05\n")
    out = tmp_path / "c.csv"
    assert run(["sweep", "--config", cfg, "--out", out]) == 0
    assert len(rows(out)) == 6
    assert run(["sweep", "--config", cfg, "--points", 2, "--out", out]) == 0
    data = rows(out)
    assert len(data) == 4 and float(data[0]["energy"]) == pytest.approx(0.05)


def test_optimize_p(tmp_path, capsys):
    out = tmp_path / "o.csv"
    assert run(["optimize-p", "--energy", 0.08, "--n", 16, "--out", out]) == 0
    text = capsys.readouterr().out
    assert "p_opt=" in text
    assert len(rows(out)) == 101


def test_codebook_dump(capsys):
    assert run(["codebook", "--n", 2]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["messages"]) == 8


def test_figure_one_low_energy_ordering(tmp_path):
    assert run(["figures", "--fig", 1, "--points", 4, "--outdir", tmp_path]) == 0
    data = rows(tmp_path / "fig1.csv")
    low = [r for r in data if float(r["energy"]) == pytest.approx(1e-3)]
    assert len(low) == 5
    for r in data:
        assert float(r["r_hadamard"]) < float(r["r_holevo"])
        assert float(r["r_dolinar"]) < float(r["r_holevo"])
    assert any(float(r["r_hadamard"]) > float(r["r_dolinar"]) for r in low)
    assert (tmp_path / "fig1.svg").read_text().count("<polyline") == 2 + 5


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "pppm.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()


def test_default_sweep_shows_pppm_advantage(tmp_path):
    out = tmp_path / "adv.csv"
    assert run(["sweep", "--n", 4, 8, 16, 32, "--emin", 0.02, "--emax", 0.5, "--points", 40,
                "--workers", 2, "--out", out]) == 0
    data = rows(out)
    assert len(data) == 160
    assert any(
        float(r["r_pppm"]) > max(float(r["r_hadamard"]), float(r["r_dolinar"])) for r in data
    )
