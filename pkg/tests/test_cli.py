"""Unit tests for the command-line interface."""

import csv
import io
import json

import pytest

from steane_sm import cli, harness


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_resources_table(capsys):
    code, out = run_cli(capsys, "resources")
    assert code == 0
    table = dict(line.split() for line in out.strip().split("\n")[1:])
    assert table == {"single": "6", "single-repeated": "12", "shor-set": "30",
                     "shor": "60", "steane": "28", "steane-repeated": "56"}


def test_run_emits_one_csv_row(capsys):
    code, out = run_cli(capsys, "run", "--protocol", "single", "--q", "1",
                        "--sequence", "A", "--mode", "mc", "--trials", "20",
                        "--p", "0.01", "--seed", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert rows[0]["protocol"] == "single"
    assert 0.0 <= float(rows[0]["f_log"]) <= 1.0
    assert tuple(rows[0]) == harness.CSV_COLUMNS


def test_run_json_format(capsys):
    code, out = run_cli(capsys, "run", "--protocol", "single", "--q", "1",
                        "--sequence", "A", "--mode", "mc", "--trials", "10",
                        "--p", "0.01", "--seed", "2", "--format", "json")
    assert code == 0
    obj = json.loads(out.strip())
    assert obj["mode"] == "mc"


def test_sweep_grid_and_out_file(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, _ = run_cli(capsys, "sweep", "--protocol", "single", "--q", "1",
                      "--p", "0.01", "0.001", "--sequence", "A", "--mode", "mc",
                      "--trials", "10", "--seed", "1", "--out", str(out_file))
    assert code == 0
    rows = list(csv.DictReader(out_file.open()))
    assert [r["p"] for r in rows] == ["0.01", "0.001"]


def test_config_file_with_cli_override(tmp_path, capsys):
    cfg = {"protocol": "single", "q": 1, "sequence": "A", "mode": "mc",
           "trials": 10, "p": 0.01, "seed": 4}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out = run_cli(capsys, "run", "--config", str(path), "--trials", "15")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["trials_or_weight"] == "15"  # CLI overrides file
    assert row["seed"] == "4"               # file value kept


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"protcol": "single"}))
    with pytest.raises(SystemExit):
        cli.main(["run", "--config", str(path)])


def test_run_rejects_multiple_p(capsys):
    with pytest.raises(SystemExit):
        cli.main(["run", "--p", "0.01", "0.001", "--protocol", "single",
                  "--q", "1", "--sequence", "A", "--mode", "mc", "--trials", "5"])


def test_determinism_across_invocations(capsys):
    argv = ["run", "--protocol", "single", "--q", "1", "--sequence", "A",
            "--mode", "mc", "--trials", "25", "--p", "0.005", "--seed", "9"]
    _, out1 = run_cli(capsys, *argv)
    _, out2 = run_cli(capsys, *argv)
    assert out1 == out2
