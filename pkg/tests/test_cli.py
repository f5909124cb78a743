import io
import json
import subprocess
import sys

import pytest

import roundlab
from roundlab import acceptance, address, cli, codes, comm, graphs, rounds, transference
from roundlab.records import SCHEMA, read_stream


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_address_record(capsys):
    code, out, err = invoke(capsys, "address", "--p", "3", "--rounds", "0")
    assert code == 0
    head, recs = read_stream(io.StringIO(out))
    assert head["schema"] == SCHEMA and head["command"] == "address"
    assert recs[0]["min_queries"] == 3 and recs[0]["dt_errors"] == 0
    assert "min_queries" in err


def test_graphs_record_fields(capsys):
    code, out, _ = invoke(capsys, "graphs", "--n", "2000", "--k", "2", "--trials", "50", "--seed", "3")
    assert code == 0
    _, (rec,) = read_stream(io.StringIO(out))
    assert {"acc_yes", "acc_no", "gap", "ci", "trials", "acc_sim", "tester"} <= set(rec)
    assert rec["trials"] == 50 and rec["full_tester_acc_yes"] == 1.0


@pytest.mark.parametrize("argv", [
    ("codes", "--p", "3", "--N", "2", "--trials", "20"),
    ("rounds", "--trials", "5"),
    ("comm", "--n", "11", "--trials", "5"),
    ("transfer", "--inputs", "2", "--trials", "3"),
])
def test_same_seed_same_stream(capsys, argv):
    first = invoke(capsys, *argv, "--seed", "7")
    second = invoke(capsys, *argv, "--seed", "7")
    assert first[0] == 0
    assert first[1] == second[1]


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.jsonl"
    code, out, _ = invoke(capsys, "rounds", "--trials", "3", "--output", str(path))
    assert code == 0 and out == ""
    head, recs = read_stream(path.open())
    assert head["config"]["trials"] == 3 and len(recs) == 3


def test_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("ROUNDLAB_SEED", "11")
    _, out, _ = invoke(capsys, "rounds", "--trials", "2")
    assert json.loads(out.splitlines()[0])["config"]["seed"] == 11
    _, explicit, _ = invoke(capsys, "rounds", "--trials", "2", "--seed", "11")
    assert out == explicit


@pytest.mark.parametrize("argv", [
    ("address", "--p", "4"),
    ("graphs", "--n", "5", "--k", "1"),
    ("graphs", "--trials", "0"),
    ("rounds", "--depth", "9"),
    ("frobnicate",),
    ("suite", "--criteria", "12"),
])
def test_usage_errors(capsys, argv):
    code, _, err = invoke(capsys, *argv)
    assert code == 1
    assert "error" in err


def test_operations_are_covered():
    modules = (address, codes, transference, graphs, rounds, comm, acceptance)
    subcommands = set(cli.COMMANDS)
    for name, command in cli.OPERATIONS.items():
        assert any(hasattr(m, name) for m in modules), name
        assert command in subcommands


def test_suite_subset(capsys):
    code, out, err = invoke(capsys, "suite", "--criteria", "2", "11", "--scale", "0.1")
    assert code == 0
    _, recs = read_stream(io.StringIO(out))
    assert [r["criterion"] for r in recs] == [2, 11]
    assert "[PASS] criterion 2" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "roundlab", "address", "--p", "3", "--rounds", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout.splitlines()[1])["min_queries"] == 2
    assert roundlab.__version__
