import json
from importlib import resources

import jsonschema
import pytest

from regcut.cli import main
from regcut.dsl import load


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def schema(verb):
    return json.loads(resources.files("regcut").joinpath("schemas", f"{verb}.json").read_text())


@pytest.mark.parametrize("verb,argv", [
    ("validate", ["--family", "running"]),
    ("check", ["--family", "running", "--k", "3", "--exact"]),
    ("coverable", ["--family", "running", "--k", "2"]),
    ("prestar", ["--family", "running"]),
    ("decide", ["--family", "filter", "--n", "2"]),
    ("bounds", ["--family", "running"]),
    ("simulate", ["--family", "filter", "--n", "2", "--k", "2", "--trials", "200"]),
    ("tight", ["--family", "filter", "--n", "2", "--k-max", "3"]),
])
def test_json_matches_schema(capsys, verb, argv):
    code, out, _ = run(capsys, verb, *argv, "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema(verb))


def test_file_source(capsys, protocols_dir):
    code, out, _ = run(capsys, "validate", str(protocols_dir / "running.rp"))
    assert code == 0 and out.startswith("ok: running")


@pytest.mark.parametrize("argv,plain", [
    (["check", "--family", "running", "--k", "3"], 0),
    (["coverable", "--family", "running", "--k", "1"], 0),
    (["decide", "--family", "running"], 0),
])
def test_strict_exit(capsys, argv, plain):
    assert run(capsys, *argv)[0] == plain
    assert run(capsys, *argv, "--strict-exit")[0] == 1


def test_strict_exit_positive_is_zero(capsys):
    assert run(capsys, "check", "--family", "filter", "--n", "2", "--k", "2", "--strict-exit")[0] == 0


def test_uncertified_bounds_is_an_input_error(capsys):
    code, _, err = run(capsys, "bounds", "--family", "running", "--index", "0")
    assert code == 2 and "UncertifiedVerdict" in err


def test_atomic_rejected_by_symbolic_commands(capsys):
    code, _, err = run(capsys, "decide", "--family", "atomic-parity")
    assert code == 2 and err.startswith("error [")


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.rp"
    bad.write_text("protocol p\nlocations q\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and "ParseError" in err


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "none.rp"))[0] == 2


def test_env_cap(capsys, monkeypatch):
    monkeypatch.setenv("REGCUT_NODE_CAP", "10")
    code, _, err = run(capsys, "check", "--family", "filter", "--n", "3", "--k", "4")
    assert code == 3 and "ResourceLimit" in err


def test_gen_then_validate(capsys, tmp_path):
    path = tmp_path / "f3.rp"
    assert run(capsys, "gen", "--family", "filter", "--n", "3", "--out", str(path))[0] == 0
    assert load(path).name == "filter3"
    code, out, _ = run(capsys, "validate", str(path), "--format", "json")
    assert code == 0 and json.loads(out)["valid"] is True


def test_export_deterministic(capsys):
    argv = ("export", "--family", "running", "--graph", "symbolic", "--highlight", "qf")
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    assert "peripheries=2" in first
    plain = run(capsys, "export", "--family", "running", "--k", "2")[1]
    assert plain.startswith("digraph") and "peripheries" not in plain


def test_simulate_trace(capsys):
    code, out, _ = run(capsys, "simulate", "--family", "running", "--k", "2", "--trace", "0", "--horizon", "20")
    assert code == 0 and out.splitlines()[0] == "q0:2 | 0"


def test_simulate_parallel_matches_serial(capsys):
    argv = ("simulate", "--family", "running", "--k", "2", "--trials", "300", "--format", "json")
    serial = json.loads(run(capsys, *argv)[1])
    parallel = json.loads(run(capsys, *argv, "--workers", "2")[1])
    assert serial == parallel


def test_usage_errors(capsys):
    assert run(capsys, "check", "--k", "2")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["check", "--family", "running"])
    assert e.value.code == 2
