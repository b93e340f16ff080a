from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from zsm import export, fixtures
from zsm.cli import main

PI1 = str(fixtures.path("pi1"))
INTRO1 = str(fixtures.path("intro1"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "argv, kind",
    [
        (["validate", PI1], "system"),
        (["run", PI1, "--depth", "3", "--all-traces"], "reachability"),
        (["compile", INTRO1], "net"),
        (["unfold", PI1, "--layers", "2"], "unfolding"),
        (["ess", INTRO1, "--layers", "2"], "ess"),
        (["check", PI1, "--depth", "3"], "check"),
    ],
)
def test_json_matches_schema_and_is_deterministic(capsys, argv, kind):
    code, first, _ = run(capsys, *argv, "--json", "-")
    assert code == 0
    doc = json.loads(first)
    assert doc["schema"] == f"zsm.{kind}.v1"
    jsonschema.validate(doc, export.load_schema(kind))
    _, second, _ = run(capsys, *argv, "--json", "-")
    assert first == second


@pytest.mark.parametrize("cmd", [["run", "--depth", "2"], ["compile"], ["unfold", "--layers", "2"],
                                 ["ess", "--layers", "2"]])
def test_dot_output(capsys, cmd):
    code, out, _ = run(capsys, cmd[0], PI1, *cmd[1:], "--dot", "-")
    assert code == 0
    assert out.startswith("digraph") and out.rstrip().endswith("}")


def test_run_text(capsys):
    code, out, _ = run(capsys, "run", PI1, "--depth", "3")
    assert code == 0
    assert "(cc) halting" in out
    assert out.splitlines()[0] == "layer 0: (ab)"


def test_ess_text(capsys):
    code, out, _ = run(capsys, "ess", INTRO1, "--layers", "1")
    assert code == 0
    assert out.splitlines()[0] == "3 events, 1 simultaneity classes"


def test_output_to_file(tmp_path, capsys):
    target = tmp_path / "net.json"
    assert main(["compile", PI1, "--json", str(target)]) == 0
    assert json.loads(target.read_text())["schema"] == "zsm.net.v1"


def test_invalid_system_exit_code(tmp_path, capsys):
    src = tmp_path / "bad.psys"
    src.write_text("psystem { objects: a; membrane 1 { init: z; } }\n")
    code, _, err = run(capsys, "validate", str(src))
    assert code == 2
    assert err.startswith(f"{src}:1:")
    assert "error:" in err


def test_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", PI1])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["unfold", PI1, "--layers", "-1"])
    assert exc.value.code == 1
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.psys"))
    assert code == 1 and "cannot read" in err


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "unfold", PI1, "--layers", "5", "--events", "3")
    assert code == 4 and "exhausted" in err
    code, _, _ = run(capsys, "run", PI1, "--depth", "3", "--state-cap", "1")
    assert code == 4


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "zsm.cli", "validate", PI1], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout == "ok: 1 membranes, 3 objects, 3 rules\n"
