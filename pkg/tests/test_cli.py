import json
import subprocess
import sys

import numpy as np
import pytest

from udesign.cli import build_parser, main

COMMANDS = ["potential", "verify", "mub", "clifford-design", "catalog", "minimize", "avg-purity", "bounds", "linopt"]
KEYS = {"command", "inputs", "results", "verdicts", "timings", "version"}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_verify_t2(capsys):
    code, rep, err = run(capsys, "verify", "qubit12", "--t", "2")
    assert code == 0 and set(rep) == KEYS
    assert rep["verdicts"]["design"] is True
    assert abs(rep["results"]["gap"]) <= 1e-12
    assert err.strip()


def test_verify_t3(capsys):
    code, rep, _ = run(capsys, "verify", "qubit12", "--t", "3")
    assert code == 1 and rep["verdicts"]["design"] is False and rep["results"]["gap"] > 0


def test_bounds(capsys):
    code, rep, _ = run(capsys, "bounds", "--d", "2")
    assert code == 0
    r = rep["results"]
    assert (r["lower"], r["clifford"], r["divisibility_min"]) == (10, 12, 12)


def test_usage_errors(capsys):
    assert run(capsys, "verify", "qubit12", "--bogus")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "verify", "/no/such/file.json")[0] == 2
    assert run(capsys, "mub", "--q", "6")[0] == 2
    assert run(capsys)[0] == 2


def test_tampered_file_is_usage_error(capsys, tmp_path):
    path = tmp_path / "d.json"
    assert run(capsys, "catalog", "emit", "qubit12", "--out", str(path))[0] == 0
    data = json.loads(path.read_text())
    data["matrices"][3][1][1][1] = 5.0
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "verify", str(path))
    assert code == 2 and "matrix 3" in err


def test_determinism(capsys):
    argv = ["minimize", "--d", "2", "--k", "12", "--restarts", "3", "--seed", "7"]
    first = (main(argv), capsys.readouterr().out)
    second = (main(argv), capsys.readouterr().out)
    assert first == second and first[0] == 0


def test_timings_opt_in(capsys):
    _, rep, _ = run(capsys, "bounds", "--d", "3")
    assert rep["timings"] == {}
    _, rep, _ = run(capsys, "bounds", "--d", "3", "--timings")
    assert rep["timings"]["total_s"] >= 0


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("UDESIGN_THREADS", "abc")
    assert run(capsys, "bounds", "--d", "2")[0] == 2
    monkeypatch.setenv("UDESIGN_THREADS", "2")
    assert run(capsys, "bounds", "--d", "2")[0] == 0


def test_catalog_and_potential(capsys, tmp_path):
    code, rep, _ = run(capsys, "catalog", "list")
    assert code == 0 and {"qubit12", "chau9", "fivedesign"} <= {x["name"] for x in rep["results"]["designs"]}
    code, rep, _ = run(capsys, "potential", "fivedesign", "--t", "5")
    assert code == 0 and abs(rep["results"]["value"] - 42) < 1e-8


def test_clifford_design(capsys, tmp_path):
    code, rep, _ = run(capsys, "clifford-design", "--p", "3")
    assert code == 0 and rep["results"]["K"] == 216 and rep["verdicts"]["design"]


def test_mub_classify(capsys, tmp_path):
    out = tmp_path / "m.json"
    code, rep, _ = run(capsys, "mub", "--q", "9", "--classify", "--d", "3", "--emit", str(out))
    assert code == 0
    assert rep["results"]["counts"] == {"maximally_entangled": 6, "product": 4}
    fam = json.loads(out.read_text())
    assert len(fam["bases"]) == 10


def test_avg_purity(capsys):
    code, rep, _ = run(capsys, "avg-purity", "--d", "2")
    assert code == 0 and rep["results"]["counting"] == "4/5"
    assert abs(rep["results"]["direct"] - 0.8) < 1e-10 and rep["verdicts"]["matches"]


def test_minimize_writes_design(capsys, tmp_path):
    out, trace = tmp_path / "d.json", tmp_path / "t.jsonl"
    code, rep, _ = run(capsys, "minimize", "--seed", "0", "--out", str(out), "--trace", str(trace))
    assert code == 0 and rep["verdicts"]["design"]
    code, rep, _ = run(capsys, "verify", str(out), "--tol", "1e-3")
    assert code == 0
    lines = trace.read_text().splitlines()
    assert "summary" in json.loads(lines[-1])


def test_linopt(capsys, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps(np.eye(4).tolist()))
    code, rep, _ = run(capsys, "linopt", "fluctuations", "--design", "qubit12", "--gamma", str(g))
    assert code == 0 and abs(rep["results"]["delta_E"]) < 1e-10
    out = tmp_path / "s.json"
    code, rep, _ = run(capsys, "linopt", "embed", "--design", "qubit12", "--out", str(out))
    assert code == 0 and out.exists()


def test_help_texts():
    ap = build_parser()
    sub = next(a for a in ap._actions if a.dest == "command")
    assert set(COMMANDS) <= set(sub.choices)
    for name in COMMANDS:
        assert sub.choices[name].format_help().strip()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "udesign", "bounds", "--d", "9"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["results"]["clifford"] == 6480
