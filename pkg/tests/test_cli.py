"""Command-line behavior: output, exit codes, JSON parity."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from causalspec import dsl, report, scm
from causalspec.cli import main

FIXTURE = str(Path(__file__).resolve().parent.parent / "fixtures" / "motor.cdag")

CYCLIC = """
model "loop" {
  node A {}
  node B {}
  node C {}
  edge A -> B {}
  edge B -> C {}
  edge C -> A {}
}
"""


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def test_validate_ok(runner):
    res = invoke(runner, "validate", FIXTURE)
    assert res.exit_code == 0
    assert "model motor: ok" in res.output
    assert "14 (16 raw)" in res.output


def test_validate_cyclic_exits_1(runner, tmp_path):
    p = tmp_path / "loop.cdag"
    p.write_text(CYCLIC)
    res = invoke(runner, "validate", str(p))
    assert res.exit_code == 1
    assert "cycle" in res.output.lower()
    # the witness names the offending nodes
    assert "A" in res.output and "B" in res.output and "C" in res.output


def test_parse_error_exits_2(runner, tmp_path):
    p = tmp_path / "broken.cdag"
    p.write_text('model "m" { node A { kind: ??? } }')
    res = invoke(runner, "validate", str(p))
    assert res.exit_code == 2


def test_missing_file_exits_2(runner):
    res = invoke(runner, "validate", "no-such-file.cdag")
    assert res.exit_code == 2


def test_validate_strict_gap(runner, tmp_path, motor_text):
    hidden = motor_text.replace(
        "node T_E { kind: observed", "node T_E { kind: latent"
    )
    p = tmp_path / "hidden.cdag"
    p.write_text(hidden)
    assert invoke(runner, "validate", str(p)).exit_code == 0
    res = invoke(runner, "validate", str(p), "--strict")
    assert res.exit_code == 1
    assert "observability gap" in res.output


def test_dsep_true(runner):
    res = invoke(runner, "dsep", FIXTURE, "Classification", "T_E", "--given", "H_s,T_s,V_s")
    assert res.exit_code == 0
    assert res.output.strip() == "d-separated: true"


def test_dsep_false(runner):
    res = invoke(runner, "dsep", FIXTURE, "Classification", "T_E")
    assert res.output.strip() == "d-separated: false"


def test_dsep_unknown_node_exits_2(runner):
    res = invoke(runner, "dsep", FIXTURE, "Classification", "Bogus")
    assert res.exit_code == 2


def test_paths_output(runner):
    res = invoke(runner, "paths", FIXTURE, "CoolingFault", "Classification")
    lines = res.output.strip().splitlines()
    assert len(lines) == 7
    assert lines[0] == "[biasing] CoolingFault <- Q <- MechFault -> V -> V_s -> Classification"


def test_adjust_output(runner):
    res = invoke(runner, "adjust", FIXTURE)
    assert res.output.strip() == "{T_E, V_s}"


def test_implications_default_scope(runner):
    res = invoke(runner, "implications", FIXTURE)
    assert len(res.output.strip().splitlines()) == 6
    assert "T_E ⊥ V_s" in res.output


def test_implications_json_is_canonical(runner, motor_doc):
    res = invoke(runner, "implications", FIXTURE, "--json")
    parsed = json.loads(res.output)
    assert len(parsed) == 6
    assert res.output == report.canonical_json(parsed)


def test_requirements_markdown(runner):
    res = invoke(runner, "requirements", FIXTURE)
    assert res.exit_code == 0
    assert "## RQ-D1" in res.output
    assert "RQ-M2" in res.output


def test_requirements_json(runner):
    res = invoke(runner, "requirements", FIXTURE, "--json")
    obj = json.loads(res.output)
    assert {a["rule"] for a in obj["requirements"]} == {"R1", "R2", "R3", "R4", "R5"}
    assert obj["monitors"][0]["statement"]["rendered"] == "T_E ⊥ V_s"


def test_simulate_then_citest(runner, tmp_path):
    csv = tmp_path / "data.csv"
    res = invoke(runner, "simulate", FIXTURE, "-n", "4000", "--seed", "11", "-o", str(csv))
    assert res.exit_code == 0
    data = scm.from_csv(csv.read_text())
    assert data.n == 4000
    res = invoke(runner, "citest", FIXTURE, str(csv))
    assert res.exit_code == 0
    assert "0 rejected" in res.output


def test_citest_single_statement_strict(runner, tmp_path, motor_text):
    # couple T_E into MechFault, then test the now-false independence
    mutated = motor_text.replace(
        "scm MechFault { type: logistic, intercept: -1.4 }",
        "scm MechFault { type: logistic, intercept: -1.4, weights: {T_E: 0.5} }",
    ).replace(
        "edge MechFault -> Q { traces: [PK2], mechanism: \"airflow\" }",
        "edge MechFault -> Q { traces: [PK2], mechanism: \"airflow\" }\n  edge T_E -> MechFault {}",
    )
    model = tmp_path / "mutated.cdag"
    model.write_text(mutated)
    csv = tmp_path / "mut.csv"
    invoke(runner, "simulate", str(model), "-n", "8000", "--seed", "3", "-o", str(csv))
    res = invoke(runner, "citest", FIXTURE, str(csv), "--x", "T_E", "--y", "V_s", "--strict")
    assert res.exit_code == 1
    assert "rejected" in res.output


def test_monitor_quiet_stream(runner, tmp_path):
    csv = tmp_path / "quiet.csv"
    invoke(runner, "simulate", FIXTURE, "-n", "2500", "--seed", "21", "-o", str(csv))
    res = invoke(runner, "monitor", FIXTURE, str(csv), "--window", "500")
    assert res.exit_code == 0
    assert "0 alarms" in res.output
    assert not [l for l in res.output.splitlines() if l.startswith("{")]  # no alarm JSON


def test_export_dot(runner):
    res = invoke(runner, "export", FIXTURE, "--format", "dot")
    assert res.output.startswith('digraph "motor"')


def test_export_json_parses(runner, motor_doc):
    res = invoke(runner, "export", FIXTURE, "--format", "json")
    assert dsl.parse_json(res.output) == motor_doc


def test_analyze_text(runner):
    res = invoke(runner, "analyze", FIXTURE)
    assert "paths: 3 causal, 2 biasing, 2 blocked" in res.output
    assert "adjustment set: {T_E, V_s}" in res.output
    assert "RQ-D1" in res.output


def test_analyze_json(runner):
    res = invoke(runner, "analyze", FIXTURE, "--json")
    obj = json.loads(res.output)
    assert obj["paths"]["counts"]["causal"] == 3


def test_help_lists_commands(runner):
    res = invoke(runner, "--help")
    for cmd in (
        "validate", "analyze", "dsep", "paths", "adjust", "implications",
        "requirements", "simulate", "citest", "monitor", "export", "serve",
    ):
        assert cmd in res.output
