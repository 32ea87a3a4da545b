import json
import subprocess
import sys

import pytest
from conftest import structure

from poissonbv.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_SKIP, main
from poissonbv.fixtures import DOCUMENTS
from poissonbv.report import COMMANDS, run

SECTION_KEYS = {"name", "status", "reason", "checks", "tables", "data"}
CHECK_KEYS = {"name", "status", "checked", "skipped", "witness"}


def write(tmp_path, document, name="pi.json"):
    p = tmp_path / name
    p.write_text(json.dumps(document))
    return str(p)


def test_check_passes_with_exit_zero(tmp_path, capsys):
    assert main(["check", "--input", write(tmp_path, DOCUMENTS["F2"])]) == EXIT_OK
    assert "summary: PASS" in capsys.readouterr().out


def test_failed_check_exits_one(tmp_path, capsys):
    doc = {
        "variables": ["x1", "x2", "x3"],
        "parity": "even",
        "bivector": [
            {"coeff": "1", "monomial": {"x3": 1}, "frame": [1, 2]},
            {"coeff": "1", "monomial": {"x2": 1}, "frame": [2, 3]},
        ],
    }
    assert main(["check", "--input", write(tmp_path, doc)]) == EXIT_FAIL
    err = capsys.readouterr().err
    assert "Jacobi" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["check"],
        ["frobnicate", "--fixture", "F2"],
        ["check", "--fixture", "F2", "--window", "0"],
        ["check", "--fixture", "F2", "--arity", "2"],
        ["check", "--fixture", "F2", "--format", "xml"],
        ["check", "--input", "/nonexistent/pi.json"],
    ],
)
def test_usage_and_input_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == EXIT_INPUT


def test_malformed_document_exits_two(tmp_path, capsys):
    path = write(tmp_path, {"variables": ["x1"], "parity": "even", "bivector": [{"coeff": "1/0", "frame": [1, 1]}]})
    assert main(["check", "--input", path]) == EXIT_INPUT
    assert "bivector[0].coeff" in capsys.readouterr().err


@pytest.mark.parametrize("command", ["bv", "gravity", "mixed"])
def test_non_semisimple_precondition(command, capsys):
    assert main([command, "--fixture", "F4", "--window", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "skipped: precondition" in out
    assert main([command, "--fixture", "F4", "--window", "2", "--strict"]) == EXIT_SKIP


def test_json_report_schema_and_out_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["modular", "--fixture", "F3", "--format", "json", "--out", str(out)]) == EXIT_OK
    r = json.loads(out.read_text())
    assert set(r) == {"tool", "version", "command", "config", "structure", "sections", "signs", "summary"}
    assert r["tool"] == "poissonbv" and r["command"] == "modular"
    assert r["config"] == {"window": 4, "arity": 4}
    assert set(r["summary"]) == {"status", "first_failure"}
    (section,) = r["sections"]
    assert set(section) == SECTION_KEYS
    for c in section["checks"]:
        assert set(c) == CHECK_KEYS
    assert section["data"]["eigenvalues"] == ["1/2", "1", "-3/2"]


def test_reports_never_contain_floats():
    text = run("all", structure("F2"), window=2).to_json()

    def walk(x):
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            assert not isinstance(x, float)

    walk(json.loads(text))


def test_all_runs_every_section():
    report = run("all", structure("F2"), window=2)
    assert [s.name for s in report.sections] == [c for c in COMMANDS if c != "all"]


def test_koszul_inside_all_is_a_precondition_but_alone_it_is_rejected():
    pi = structure("F1")
    alone = run("koszul", pi, window=2)
    assert alone.status == "fail"
    inside = run("all", pi, window=2)
    (k,) = [s for s in inside.sections if s.name == "koszul"]
    assert k.status == "skipped" and k.reason.startswith("skipped: precondition")


def test_text_report_lists_sign_conventions():
    text = run("check", structure("F2")).to_text()
    assert "sign conventions:" in text
    assert "top contraction" in text


def test_run_validates_arguments():
    with pytest.raises(ValueError):
        run("nope", structure("F2"))
    with pytest.raises(ValueError):
        run("check", structure("F2"), window=0)


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "poissonbv", "modular", "--fixture", "F2", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["status"] == "pass"
