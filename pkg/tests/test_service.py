"""HTTP service contract: storage, analysis routes, concurrency, errors."""

import json
import warnings
from pathlib import Path

import pytest
from click.testing import CliRunner

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from causalspec import dsl
from causalspec.cli import main as cli_main
from causalspec.service import create_app

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "motor.cdag"


@pytest.fixture()
def client(tmp_path):
    return TestClient(create_app(tmp_path))


@pytest.fixture()
def motor_client(tmp_path, motor_text):
    client = TestClient(create_app(tmp_path))
    res = client.put(
        "/models/motor", content=motor_text, headers={"content-type": "text/plain"}
    )
    assert res.status_code == 200
    return client


def test_list_empty(client):
    res = client.get("/models")
    assert res.status_code == 200
    assert json.loads(res.content) == {"models": []}


def test_put_then_get(motor_client, motor_text):
    res = motor_client.get("/models/motor")
    assert res.status_code == 200
    obj = json.loads(res.content)
    assert obj["name"] == "motor"
    assert obj["source"] == motor_text
    assert obj["document"]["name"] == "motor"
    assert res.headers["ETag"] == obj["hash"]


def test_list_after_put(motor_client):
    obj = json.loads(motor_client.get("/models").content)
    assert [m["name"] for m in obj["models"]] == ["motor"]
    assert len(obj["models"][0]["hash"]) == 64


def test_put_json_body(client, motor_doc):
    res = client.put(
        "/models/motor",
        content=dsl.to_json(motor_doc),
        headers={"content-type": "application/json"},
    )
    assert res.status_code == 200
    # stored canonically as DSL; re-fetching parses back to the same model
    source = json.loads(client.get("/models/motor").content)["source"]
    assert dsl.parse(source) == motor_doc


def test_stale_hash_conflict(motor_client, motor_text):
    res = motor_client.put(
        "/models/motor",
        content=motor_text,
        headers={"content-type": "text/plain", "If-Match": "0" * 64},
    )
    assert res.status_code == 409
    body = json.loads(res.content)
    assert body["error"] == "stale model hash"
    assert body["current_hash"]


def test_fresh_hash_write(motor_client, motor_text):
    current = json.loads(motor_client.get("/models/motor").content)["hash"]
    res = motor_client.put(
        "/models/motor",
        content=motor_text,
        headers={"content-type": "text/plain", "If-Match": current},
    )
    assert res.status_code == 200


def test_if_match_on_missing_model(client, motor_text):
    res = client.put(
        "/models/new",
        content=motor_text,
        headers={"content-type": "text/plain", "If-Match": "f" * 64},
    )
    assert res.status_code == 409


def test_put_invalid_model_diagnostics(client):
    res = client.put(
        "/models/bad",
        content='model "bad" { node A { kind: fuzzy } }',
        headers={"content-type": "text/plain"},
    )
    assert res.status_code == 400
    body = json.loads(res.content)
    assert "kind" in body["error"]
    assert body["line"] >= 1 and body["column"] >= 1


def test_put_cyclic_model_rejected(client):
    res = client.put(
        "/models/loop",
        content='model "loop" { node A {} node B {} edge A -> B {} edge B -> A {} }',
        headers={"content-type": "text/plain"},
    )
    assert res.status_code == 400
    assert json.loads(res.content)["witness"]


def test_put_bad_name(client):
    res = client.put("/models/bad%20name", content="x")
    assert res.status_code == 400


def test_get_unknown_model(client):
    assert client.get("/models/nope").status_code == 404
    assert client.post("/models/nope/analyze").status_code == 404


def test_analyze_route(motor_client):
    res = motor_client.post("/models/motor/analyze")
    assert res.status_code == 200
    obj = json.loads(res.content)
    assert obj["paths"]["counts"] == {"biasing": 2, "blocked": 2, "causal": 3}
    assert len(res.headers["X-Model-Hash"]) == 64


def test_dsep_route(motor_client):
    res = motor_client.post(
        "/models/motor/dsep", json={"x": "V_s", "y": "T_E", "given": []}
    )
    assert json.loads(res.content)["separated"] is True
    # conditioning on the collider CoolingFault opens the spurious trail
    res = motor_client.post(
        "/models/motor/dsep", json={"x": "V_s", "y": "T_E", "given": ["CoolingFault"]}
    )
    assert json.loads(res.content)["separated"] is False
    res = motor_client.post("/models/motor/dsep", json={"x": "V_s", "y": "Bogus"})
    assert res.status_code == 400


def test_implications_route(motor_client):
    res = motor_client.post("/models/motor/implications", json={})
    stmts = json.loads(res.content)
    assert len(stmts) == 6
    res = motor_client.post("/models/motor/implications", json={"max_given": 0})
    assert [s["rendered"] for s in json.loads(res.content)] == ["T_E ⊥ V_s"]


def test_requirements_route(motor_client):
    obj = json.loads(motor_client.post("/models/motor/requirements", json={}).content)
    assert [a["id"] for a in obj["requirements"]] == [
        "RQ-D1", "RQ-D2", "RQ-D3", "RQ-M1", "RQ-M2",
    ]
    assert obj["monitors"][0]["window"] == 500


def test_export_routes(motor_client, motor_doc):
    dot = motor_client.get("/models/motor/export?format=dot")
    assert dot.status_code == 200
    assert dot.text.startswith('digraph "motor"')
    assert 'fillcolor="gray85"' in dot.text
    as_json = motor_client.get("/models/motor/export?format=json")
    assert dsl.parse_json(as_json.text) == motor_doc
    assert motor_client.get("/models/motor/export?format=pdf").status_code == 400


def test_cli_and_service_json_identical(motor_client):
    """The same query must serialize identically through either interface."""
    runner = CliRunner()
    pairs = [
        (["analyze", str(FIXTURE), "--json"], "/models/motor/analyze"),
        (["implications", str(FIXTURE), "--json"], "/models/motor/implications"),
        (["requirements", str(FIXTURE), "--json"], "/models/motor/requirements"),
    ]
    for cli_args, route in pairs:
        cli_out = runner.invoke(cli_main, cli_args, catch_exceptions=False).output
        http_out = motor_client.post(route).content.decode("utf-8")
        assert cli_out == http_out, route


def test_hash_tracks_content(motor_client, motor_text):
    h1 = json.loads(motor_client.get("/models/motor").content)["hash"]
    edited = motor_text + "\n# trailing note\n"
    motor_client.put(
        "/models/motor", content=edited, headers={"content-type": "text/plain"}
    )
    h2 = json.loads(motor_client.get("/models/motor").content)["hash"]
    assert h1 != h2
