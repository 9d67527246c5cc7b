import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from twistedhodge.cli import CONVERGENCE_FIELDS, main

ROOT = Path(__file__).resolve().parent.parent


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_table_json(capsys):
    code, out, _ = run(["table", "--model", "carriere", "--trace", "3", "--modes", "8", "--flavor", "all"], capsys)
    assert code == 0
    payload = json.loads(out)
    graded = {t["flavor"]: t["graded"] for t in payload["tables"]}
    assert graded == {"B": [1, 1, 0], "T": [0, 1, 1], "kappa": [0, 0, 0]}


def test_table_csv(capsys):
    code, out, _ = run(["table", "--model", "taut", "--modes", "4", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert {(r["r"], r["s"]): r["dim"] for r in rows}[("1", "")] == "2"


@pytest.mark.parametrize("args", [
    ["table", "--trace", "2"],
    ["table", "--trace", "-1"],
    ["table", "--modes", "0"],
    ["table", "--model", "nowhere.json"],
    ["table", "--model", "klein-bottle"],
    ["spectrum", "--operator", "d_kappa"],
    ["frobnicate"],
    ["identities", "--tol-identity", "-1"],
    ["convergence", "--modes-list", "4,2"],
])
def test_invalid_input_exit_2(args, capsys):
    code, _, _ = run(args, capsys)
    assert code == 2


def test_invalid_p_file(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text("[[0, 1.0, 0.0]]")
    assert run(["table", "--model", "suspension", "--p-file", str(p)], capsys)[0] == 2
    p.write_text("not json")
    assert run(["table", "--model", "suspension", "--p-file", str(p)], capsys)[0] == 2


def test_p_file_and_model_files(capsys):
    code, out, _ = run(["table", "--model", "suspension", "--c", "0.5", "--p-file",
                        str(ROOT / "models" / "p_bandwidth3.json"), "--modes", "6"], capsys)
    assert code == 0 and json.loads(out)["tables"][0]["graded"] == [0, 0, 0]
    for f in sorted((ROOT / "models").glob("*.json")):
        if f.name.startswith("p_"):
            continue
        assert run(["table", "--model", str(f), "--modes", "3"], capsys)[0] == 0


def test_identities_and_weitzenbock_pass(capsys):
    assert run(["identities", "--model", "taut", "--modes", "6"], capsys)[0] == 0
    code, out, _ = run(["weitzenbock", "--model", str(ROOT / "models" / "perturbed.json"), "--modes", "12"], capsys)
    assert code == 0
    verdicts = {c["verdict"] for s in json.loads(out)["suites"] for c in s["checks"]}
    assert "n/a" in verdicts


def test_failing_check_exits_1(capsys):
    # harmonic (r,0) forms are not Vbar-parallel on a non-minimal taut model
    code, _, _ = run(["weitzenbock", "--model", "suspension", "--c", "0", "--p-file",
                      str(ROOT / "models" / "p_bandwidth3.json"), "--modes", "10"], capsys)
    assert code == 1
    assert run(["identities", "--modes", "6", "--tol-identity", "1e-30"], capsys)[0] == 1


def test_spectrum(capsys):
    code, out, _ = run(["spectrum", "--modes", "8", "--degree", "0", "--count", "2"], capsys)
    assert code == 0
    assert json.loads(out)["eigenvalues"][0] == pytest.approx(0.2315648, abs=1e-6)


def test_convergence_csv(capsys):
    code, out, _ = run(["convergence", "--model", str(ROOT / "models" / "bandwidth3.json"),
                        "--modes-list", "1,2,5,8", "--format", "csv", "--flavor", "kappa"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == CONVERGENCE_FIELDS
    assert {r["N"] for r in rows} == {"1", "2", "5", "8"}


def test_all_csv_and_out_file(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert run(["all", "--modes", "6", "--format", "csv", "--out", str(out)], capsys)[0] == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert rows and all(r["verdict"] in ("pass", "n/a") for r in rows)


def test_byte_identical_runs(tmp_path):
    outs = []
    for i in range(2):
        target = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "twistedhodge.cli", "all", "--model", "taut", "--modes", "4",
                        "--out", str(target)], check=True)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "twistedhodge.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "convergence" in res.stdout
