import csv
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from oscnet.cli import build_parser, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SUBCOMMANDS = ["eigen", "simulate", "msf", "floquet", "experiment"]
REF_EIGS = [0.0, 0.3, 2.0, 2.0, 2.0, 2.8, 4.0, 4.9]


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    assert all(len(r) == len(header) for r in body)
    return header, body


def test_eigen_paper_network(tmp_path, capsys):
    out = tmp_path / "spectrum.csv"
    assert main(["eigen", "--preset", "paper-network", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    values = [float(line.split()[1]) for line in printed.splitlines() if line.startswith("lambda_")]
    np.testing.assert_allclose(values, REF_EIGS, atol=0.05)
    header, body = read_csv(out)
    assert header == ["index", "eigenvalue"]
    assert [int(r[0]) for r in body] == list(range(1, 9))
    np.testing.assert_allclose([float(r[1]) for r in body], REF_EIGS, atol=0.05)


def test_eigen_edge_list_and_svg(tmp_path):
    out, svg = tmp_path / "s.csv", tmp_path / "s.svg"
    assert main(["eigen", "--nodes", "4", "--edges", "0-1,1-2,2-3,3-0", "--out", str(out),
                 "--svg", str(svg)]) == 0
    _, body = read_csv(out)
    np.testing.assert_allclose([float(r[1]) for r in body], [0, 2, 2, 4], atol=1e-12)
    root = ET.parse(svg).getroot()
    assert root.tag.endswith("svg")
    assert any(el.tag.endswith("polyline") for el in root)


def test_msf_curve(tmp_path):
    out = tmp_path / "msf.csv"
    assert main(["msf", "--mu", "1", "--lambda", "4.9", "--kappa", "0:1:0.05", "--out", str(out)]) == 0
    header, body = read_csv(out)
    assert header == ["kappa", "alpha", "max_multiplier", "max_exponent"]
    assert len(body) == 21
    rho = np.array([float(r[2]) for r in body])
    assert rho[0] == pytest.approx(1.0, abs=1e-5)
    assert np.all(np.diff(rho) < 0)


def test_msf_from_config_uses_lambda_max(tmp_path, capsys):
    out = tmp_path / "msf.csv"
    assert main(["msf", "--config", str(CONFIGS / "paper_network.ini"), "--kappa", "0:0.2:0.1",
                 "--out", str(out)]) == 0
    assert "4.903212" in capsys.readouterr().out
    _, body = read_csv(out)
    assert float(body[1][1]) == pytest.approx(-0.1 * 4.903211925911555, rel=1e-12)


def test_floquet_report(capsys):
    assert main(["floquet", "--mu", "1", "--kappa", "0.5", "--lambda", "1.0"]) == 0
    text = capsys.readouterr().out
    fields = dict(line.split(None, 1) for line in text.splitlines() if line.strip())
    assert float(fields["gamma"]) == -0.5
    assert float(fields["max_exponent"]) == pytest.approx(-0.5, abs=1e-4)
    assert float(fields["periodicity_error"]) < 1e-6
    assert fields["stable"].strip() == "True"


def test_floquet_needs_kappa_and_lambda_together(capsys):
    assert main(["floquet", "--kappa", "0.5"]) == 1


def test_simulate_writes_trajectory(tmp_path):
    out = tmp_path / "traj.csv"
    assert main(["simulate", "--preset", "paper-network", "--t-end", "2", "--record-stride", "100",
                 "--kappa", "0@0,0.5@1", "--seed", "3", "--out", str(out)]) == 0
    header, body = read_csv(out)
    assert header[0] == "t" and header[1:3] == ["x1_1", "x1_2"] and header[-1] == "x8_2"
    assert len(header) == 17 and len(body) == 21


def test_experiment_command(tmp_path, capsys):
    out, svg = tmp_path / "sync.csv", tmp_path / "sync.svg"
    code = main(["experiment", "--preset", "paper-network", "--kappa-on", "0.5", "--t-switch", "15",
                 "--t-end", "60", "--seed", "1", "--out", str(out), "--svg", str(svg)])
    assert code == 0
    text = capsys.readouterr().out
    assert "x1-y1" in text and "x1-x3" in text
    sync_line = [ln for ln in text.splitlines() if ln.startswith("sync_time")][0]
    assert sync_line.split()[1] != "none"
    header, body = read_csv(out)
    assert header == ["t", "error"]
    ET.parse(svg)


def test_csv_output_is_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--config", str(CONFIGS / "ring6.ini"), "--t-end", "5", "--seed", "9"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_documents_every_flag(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    sub = build_parser()._subparsers._group_actions[0].choices[cmd]
    for action in sub._actions:
        for opt in action.option_strings:
            assert opt in text
        if action.option_strings and action.dest != "help":
            assert action.help


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["msf", "--no-such-flag"])
    assert exc.value.code == 1


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\nmu = -1\n")
    assert main(["eigen", "--config", str(bad)]) == 1
    assert "mu must be > 0" in capsys.readouterr().err


def test_missing_config_file_exit_code(tmp_path):
    assert main(["eigen", "--config", str(tmp_path / "nope.ini")]) == 1


def test_numerical_failure_exit_code(tmp_path, capsys):
    code = main(["simulate", "--preset", "paper-network", "--kappa", "100@0", "--dt", "0.5",
                 "--t-end", "50", "--out", str(tmp_path / "t.csv")])
    assert code == 2
    assert "at t=" in capsys.readouterr().err


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "oscnet.cli", "eigen", "--preset", "paper-network",
                           "--out", str(tmp_path / "s.csv")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "lambda_8" in proc.stdout
