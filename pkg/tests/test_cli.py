from __future__ import annotations

import json
from pathlib import Path

import pytest

from artinglue.cli import emit_report, main
from artinglue.errors import LawViolation, ParseError, UnresolvedName
from artinglue.runner import RunConfig, ScenarioReport, run_scenario, run_task
from artinglue.scenario import parse_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

ONE = """\
base one
  object o
task subterminals one
"""

NON_ASSOCIATIVE = """\
base bad
  object a
  arrow f : a -> a
  arrow g : a -> a
  compose f.f = g
  compose f.g = f
  compose g.f = g
  compose g.g = g
"""

MISSING_ARROW = """\
base arrow
  object a
  object b
  arrow u : a -> b
functor half : arrow -> arrow
  obj a -> a
  obj b -> b
"""


def test_minimal_scenario_has_one_task():
    sc = parse_scenario(ONE)
    assert len(sc.tasks) == 1 and sc.tasks[0].kind == "subterminals"
    rep = run_task(sc, sc.tasks[0])
    assert rep.status == "pass" and rep.details["count"] == 2


def test_missing_arrow_assignment_is_unresolved():
    with pytest.raises(UnresolvedName):
        parse_scenario(MISSING_ARROW)


def test_non_associative_base_is_a_law_violation():
    with pytest.raises(LawViolation, match="associative"):
        parse_scenario(NON_ASSOCIATIVE)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("base one\n  object o\n  wibble\n", 3, 3),
        ("task frobnicate finset\n", 1, 6),
        ("  object o\n", 1, 3),
        ("task adjunction sideways finset\n", 1, 6),
    ],
)
def test_parse_errors_are_located(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_scenario(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_unknown_names_are_rejected_before_running():
    with pytest.raises(UnresolvedName):
        parse_scenario("task subterminals nowhere\n")
    with pytest.raises(UnresolvedName):
        parse_scenario("task roundtrip gamma psi=nope\n")


def test_shipped_finset2_fixture_has_seven_tasks():
    sc = parse_scenario((SCENARIOS / "finset2-glueing.scn").read_text())
    assert len(sc.tasks) == 7


@pytest.mark.parametrize(
    "task",
    [
        "glue id_finset; check adjunction pi2",
        "pullback-representation finset2 U=(1,0) probes=default",
        "roundtrip gamma psi=bang",
    ],
)
def test_documented_tasks_pass(task):
    sc = parse_scenario(f"task {task}\n")
    rep = run_task(sc, sc.tasks[0])
    assert rep.status == "pass", rep.as_dict()


def test_roundtrip_reports_inverse_law():
    sc = parse_scenario("task roundtrip gamma psi=bang\n")
    rep = run_task(sc, sc.tasks[0])
    assert rep.details["result"] == "Γ⁻¹Γ = id"
    assert any(c["law"].startswith("Γ⁻¹Γ") and c["passed"] for c in rep.checks)


def test_empty_report_summary():
    out = emit_report(ScenarioReport("empty", RunConfig()), "text")
    assert out.strip().endswith("0 tasks: 0 passed, 0 failed, 0 errors")
    assert json.loads(emit_report(run_scenario(parse_scenario("")), "structured"))["summary"]["tasks"] == 0


def test_failing_check_carries_witness(tmp_path, capsys):
    path = tmp_path / "fail.scn"
    path.write_text("task subterminals finset expect=5\n")
    assert main(["check", str(path), "--format", "structured"]) == 1
    body = json.loads(capsys.readouterr().out)
    failed = [c for c in body["tasks"][0]["checks"] if not c["passed"]]
    assert failed and failed[0]["witness"] == "2"


def test_errors_inside_tasks_do_not_abort_the_run():
    sc = parse_scenario("task subterminals finset\ntask glue One; check adjunction pi1 cap=0\n")
    rep = run_scenario(sc)
    assert [t.index for t in rep.tasks] == [0, 1]
    assert rep.tasks[0].status == "pass"


def test_invalid_input_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text(NON_ASSOCIATIVE)
    assert main(["check", str(bad)]) == 2
    assert "LawViolation" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "absent.scn")]) == 2
    good = tmp_path / "good.scn"
    good.write_text(ONE)
    assert main(["check", str(good), "--budget", "0"]) == 2


def test_text_report_and_probe_size(tmp_path, capsys):
    path = tmp_path / "one.scn"
    path.write_text(ONE)
    assert main(["check", str(path), "--probe-size", "1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("[PASS ] 0: subterminals one")
    assert out.rstrip().endswith("1 task: 1 passed, 0 failed, 0 errors")


def test_structured_output_is_byte_identical(tmp_path, capsys):
    path = tmp_path / "one.scn"
    path.write_text(ONE + "task roundtrip gamma psi=bang\n")
    outs = []
    for _ in range(2):
        assert main(["check", str(path), "--format", "structured"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert "seconds" not in outs[0]
