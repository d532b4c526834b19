"""Parser, serializer, and validation behavior of the model DSL."""

import json

import pytest

from causalspec import dsl
from causalspec.errors import ParseError


def test_motor_fixture_parses(motor_doc):
    assert motor_doc.name == "motor"
    assert len(motor_doc.nodes) == 16
    assert len(motor_doc.edges) == 19
    assert motor_doc.exposure() == "CoolingFault"
    assert motor_doc.outcome() == "Classification"
    assert motor_doc.assumption_tags() == ["FR1", "PK1", "PK2", "PK3", "PK4", "PK5"]


def test_motor_summary_groups_disturbances(motor_doc):
    # the three U_* nodes share a label, so the display count collapses them
    assert motor_doc.summary() == {
        "nodes": 14,
        "edges": 16,
        "raw_nodes": 16,
        "raw_edges": 19,
    }


def test_motor_has_mechanism_per_node(motor_doc):
    mechs = motor_doc.mechanism_map()
    assert set(mechs) == set(motor_doc.node_names())


def test_disturbance_sugar_expands():
    doc = dsl.parse(
        """
        model "m" {
          node S { kind: observed }
          disturbance U -> S { label: "noise" }
        }
        """
    )
    u = doc.node("U")
    assert u.kind == "latent"
    assert u.role == "disturbance"
    assert u.label == "noise"
    assert ("U", "S") in [(e.src, e.dst) for e in doc.edges]


def test_round_trip_dsl(motor_doc):
    again = dsl.parse(dsl.to_dsl(motor_doc))
    assert again == motor_doc


def test_round_trip_json(motor_doc):
    again = dsl.parse_json(dsl.to_json(motor_doc))
    assert again == motor_doc


def test_load_sniffs_format(motor_doc, motor_text):
    assert dsl.load(motor_text) == motor_doc
    assert dsl.load(dsl.to_json(motor_doc)) == motor_doc


def test_serialize_dispatch(motor_doc):
    assert dsl.serialize(motor_doc, "dsl").startswith("model")
    assert json.loads(dsl.serialize(motor_doc, "json"))["name"] == "motor"
    with pytest.raises(ValueError):
        dsl.serialize(motor_doc, "yaml")


def test_string_escapes_round_trip():
    doc = dsl.parse(r'model "m" { node A { label: "a \"quoted\" \\ name" } }')
    assert doc.node("A").label == 'a "quoted" \\ name'
    assert dsl.parse(dsl.to_dsl(doc)) == doc


def test_comments_and_whitespace():
    doc = dsl.parse(
        """
        # leading comment
        model "m" {  # trailing comment
          node A {}
          node B {}
          edge A -> B {}  # another
        }
        """
    )
    assert doc.node_names() == ["A", "B"]


def test_scientific_notation_numbers():
    doc = dsl.parse(
        'model "m" { node A {} scm A { type: linear_gaussian, intercept: -1.5e-2, sd: 2E3 } }'
    )
    mech = doc.mechanism_map()["A"]
    assert mech.intercept == -0.015
    assert mech.noise_sd == 2000.0


# --- diagnostics ---------------------------------------------------------


def _err(source: str) -> ParseError:
    with pytest.raises(ParseError) as info:
        dsl.parse(source)
    return info.value


def test_error_has_position():
    err = _err('model "m" { node A { kind observed } }')
    assert err.line >= 1
    assert err.column >= 1


def test_unknown_attribute_rejected():
    err = _err('model "m" { node A { shape: "round" } }')
    assert "shape" in str(err)


def test_bad_kind_enum():
    err = _err('model "m" { node A { kind: fuzzy } }')
    assert "kind" in str(err)


def test_duplicate_node():
    err = _err('model "m" { node A {} node A {} }')
    assert "duplicate" in str(err).lower()


def test_edge_unknown_endpoint():
    err = _err('model "m" { node A {} edge A -> B {} }')
    assert "B" in str(err)


def test_self_loop_rejected():
    err = _err('model "m" { node A {} edge A -> A {} }')
    assert "self" in str(err).lower() or "cycle" in str(err).lower()


def test_two_exposures_rejected():
    err = _err(
        'model "m" { node A { role: exposure } node B { role: exposure } }'
    )
    assert "exposure" in str(err)


def test_undeclared_trace_tag():
    err = _err('model "m" { node A { traces: [PK9] } }')
    assert "PK9" in str(err)


def test_mechanism_weights_must_match_parents():
    err = _err(
        'model "m" { node A {} node B {} '
        "scm B { type: linear_gaussian, weights: {A: 1.0} } }"
    )
    assert "parent" in str(err).lower()


def test_cpd_rows_must_sum_to_one():
    err = _err(
        'model "m" { node A {} '
        "scm A { type: cpd, levels: [0, 1], table: [[0.6, 0.6]] } }"
    )
    assert "sum" in str(err).lower()


def test_missing_brace_reported():
    err = _err('model "m" { node A {} ')
    assert err.line >= 1


def test_json_rejects_unknown_keys():
    obj = {"name": "m", "nodes": [{"name": "A", "color": "red"}]}
    with pytest.raises(ParseError):
        dsl.parse_json(json.dumps(obj))


def test_json_bad_syntax_is_parse_error():
    with pytest.raises(ParseError):
        dsl.parse_json("{not json")
