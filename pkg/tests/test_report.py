"""JSON/DOT/markdown builders and report-level invariants."""

import json

from causalspec import report
from causalspec.dsl import parse


def test_canonical_json_shape():
    text = report.canonical_json({"b": 1, "a": [2, 3]})
    assert text == '{\n  "a": [\n    2,\n    3\n  ],\n  "b": 1\n}\n'


def test_dot_export(motor_doc):
    dot = report.to_dot(motor_doc)
    assert dot.startswith('digraph "motor"')
    assert '"MechFault" [fillcolor="gray85"' in dot  # latent shading
    assert '"T_E" [fillcolor="white"' in dot
    assert "penwidth=2" in dot  # exposure/outcome emphasis
    assert '"CoolingFault" -> "R1"' in dot
    # mechanism-tagged edges are colored and labeled
    assert 'label="flux"' in dot
    colored = [line for line in dot.splitlines() if "color=" in line and "->" in line]
    assert colored


def test_dot_handles_quotes():
    doc = parse('model "m" { node A { label: "say \\"hi\\"" } }')
    dot = report.to_dot(doc)
    assert 'say \\"hi\\"' in dot


def test_analysis_report_structure(motor_doc):
    obj = report.analysis_report(motor_doc)
    assert obj["model"] == "motor"
    assert obj["validation"]["acyclic"] is True
    assert obj["validation"]["summary"]["nodes"] == 14
    assert obj["paths"]["counts"] == {"causal": 3, "biasing": 2, "blocked": 2}
    assert [s["members"] for s in obj["adjustment"]["minimal_sets"]] == [["T_E", "V_s"]]
    assert len(obj["implications"]) == 6
    assert [a["id"] for a in obj["requirements"]] == [
        "RQ-D1", "RQ-D2", "RQ-D3", "RQ-M1", "RQ-M2",
    ]
    assert [m["id"] for m in obj["monitors"]] == ["MON-1"]
    json.dumps(obj)  # JSON-ready throughout


def test_analysis_report_internally_consistent(motor_doc):
    """Cited evidence resolves to entries of the same report."""
    obj = report.analysis_report(motor_doc)
    path_renders = {
        p["rendered"] for kind in ("causal", "biasing", "blocked") for p in obj["paths"][kind]
    }
    ci_renders = {s["rendered"] for s in obj["implications"]}
    for artifact in obj["requirements"] + obj["test_cases"]:
        for ev in artifact["evidence"]:
            if ev["type"] == "ci":
                assert ev["rendered"] in ci_renders
            elif artifact["rule"] not in ("R3",):
                # R3 cites disturbance edges, which are not exposure paths
                assert ev["rendered"] in path_renders
    for mon in obj["monitors"]:
        assert mon["statement"]["rendered"] in ci_renders


def test_analysis_report_stable_under_reordering(motor_doc):
    """Declaring the same model in a different order changes nothing."""
    from dataclasses import replace

    nodes = tuple(reversed(motor_doc.nodes))
    edges = tuple(reversed(motor_doc.edges))
    shuffled = replace(motor_doc, nodes=nodes, edges=edges)
    a = report.analysis_report(motor_doc)
    b = report.analysis_report(shuffled)
    assert report.canonical_json(a) == report.canonical_json(b)


def test_analysis_report_without_roles():
    doc = parse('model "m" { node A {} node B {} edge A -> B {} }')
    obj = report.analysis_report(doc)
    assert obj["paths"] is None
    assert obj["validation"]["exposure"] is None
    assert obj["requirements"] == []


def test_runtime_scope(motor_dag):
    scope = report.runtime_scope(motor_dag)
    assert set(scope) == {"CoolingFault", "T_E", "T_s", "H_s", "V_s", "Classification"}


def test_requirements_markdown(motor_doc, motor_dag):
    from causalspec import derivation

    artifacts = derivation.derive_requirements(motor_dag, motor_doc)
    cases = derivation.derive_test_cases(motor_dag, doc=motor_doc)
    monitors = derivation.derive_monitors(motor_dag)
    text = report.requirements_markdown(artifacts, cases, monitors)
    assert "## RQ-D1" in text
    assert "## TC-1" in text
    assert "MON-1" in text
    assert "T_E ⊥ V_s" in text


def test_validation_lines(motor_doc, motor_dag):
    from causalspec import citest, scm

    data = scm.sample(scm.from_document(motor_doc), 1000, seed=0)
    results = citest.validate_model(motor_dag, data)
    lines = report.validation_lines(results)
    assert len(lines) == len(results) + 1
    assert lines[-1].endswith("rejected")
