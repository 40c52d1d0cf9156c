import csv

import pytest

from pendsim import cli, verify
from pendsim.io import scenario_path


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert cli.main(["simulate", "--config", str(scenario_path("free_decay")),
                     "--out", str(out)]) == 0
    assert len(list(csv.reader(open(out)))) == 3002
    assert "settling time 7.9" in capsys.readouterr().out


def test_simulate_accepts_bundled_name(tmp_path):
    assert cli.main(["simulate", "--config", "relay", "--out", str(tmp_path / "r.csv")]) == 0


def test_validation_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('model = "reduced"\ny0 = [1.0, 2.0]\n')
    assert cli.main(["simulate", "--config", str(bad)]) == 1
    assert "y0" in capsys.readouterr().err
    assert cli.main(["simulate", "--config", str(tmp_path / "missing.toml")]) == 1


def test_verify_suites(capsys):
    for suite in ("transforms", "lyapunov", "consistency"):
        assert cli.main(["verify", "--suite", suite]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_verify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setitem(verify.SUITES, "transforms",
                        lambda: [verify.Check("broken", False, "injected")])
    assert cli.main(["verify", "--suite", "transforms"]) == 2
    assert "[FAIL] broken" in capsys.readouterr().out


def test_compare(capsys):
    assert cli.main(["compare", "--config", "full_plant"]) == 0
    assert "sup deviation" in capsys.readouterr().out


def test_sweep_and_basin(tmp_path, capsys):
    cfg = tmp_path / "obs.toml"
    cfg.write_text(scenario_path("observer").read_text().replace("t_end = 30.0", "t_end = 5.0"))
    assert cli.main(["sweep-mu", "--config", str(cfg), "--mu", "0.1,0.03"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "mu,deviation" and len(lines) == 3
    assert cli.main(["basin", "--config", str(cfg), "--grid", "omega=-1:1:2",
                     "--t-end", "20", "--mu", "0.03"]) == 0
    assert "2/2 converged" in capsys.readouterr().out
    assert cli.main(["basin", "--config", str(cfg), "--grid", "theta=0:1:2"]) == 1


def test_usage_error():
    with pytest.raises(SystemExit):
        cli.main(["frobnicate"])
