"""HTTP API flows over the voting KB."""

import pytest
from fastapi.testclient import TestClient

from fodot.config import Config
from fodot.service import create_app

from conftest import VOTING_SRC


@pytest.fixture(scope="module")
def client():
    app = create_app(Config(), ui_dir=None)
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def kb_id(client):
    response = client.post("/kb", json={"source": VOTING_SRC})
    assert response.status_code == 201
    return response.json()["kb_id"]


def new_session(client, kb_id):
    response = client.post("/session", json={"kb_id": kb_id})
    assert response.status_code == 201
    return response.json()["session_id"]


def atom_status(state, text):
    return {a["atom"]: a["status"] for a in state["atoms"]}[text]


def test_kb_meta(client, kb_id):
    meta = client.get(f"/kb/{kb_id}/meta").json()
    names = [s["name"] for s in meta["symbols"]]
    assert names == ["age", "vote"]
    age = meta["symbols"][0]
    assert age["result"] == "AgeT"
    assert len(age["extension"]) == 121


def test_unknown_kb_404(client):
    assert client.get("/kb/nope/meta").status_code == 404
    assert client.post("/session", json={"kb_id": "nope"}).status_code == 404


def test_bad_source_422(client):
    response = client.post("/kb", json={"source": "vocabulary V {"})
    assert response.status_code == 422


def test_edit_propagates(client, kb_id):
    sid = new_session(client, kb_id)
    response = client.post(f"/session/{sid}/edit", json={
        "action": "assert", "term": "vote()", "value": True})
    assert response.status_code == 200
    body = response.json()
    assert atom_status(body["state"], "18 =< age()") == "propagated_true"
    assert "18 =< age()" in body["changed"]


def test_edit_age_17_propagates_vote_false(client, kb_id):
    sid = new_session(client, kb_id)
    response = client.post(f"/session/{sid}/edit", json={
        "action": "assert", "term": "age()", "value": 17})
    assert response.status_code == 200
    assert atom_status(response.json()["state"], "vote()") == "propagated_false"


def test_conflict_409_with_explanation(client, kb_id):
    sid = new_session(client, kb_id)
    client.post(f"/session/{sid}/edit", json={
        "action": "assert", "term": "vote()", "value": True})
    response = client.post(f"/session/{sid}/edit", json={
        "action": "assert", "term": "age()", "value": 17})
    assert response.status_code == 409
    explanation = response.json()["explanation"]
    assert len(explanation) == 3
    sources = " ".join(i["source"] for i in explanation)
    assert "vote() <=> 18 =< age()" in sources


def test_explain_endpoint(client, kb_id):
    sid = new_session(client, kb_id)
    client.post(f"/session/{sid}/edit", json={
        "action": "assert", "term": "vote()", "value": True})
    response = client.post(f"/session/{sid}/explain",
                           json={"literal": "18 =< age()"})
    assert response.status_code == 200
    labels = sorted(i["label"] for i in response.json()["explanation"])
    assert labels == ["ax0", "fact0", "goal"]


def test_optimize_endpoint(client, kb_id):
    sid = new_session(client, kb_id)
    client.post(f"/session/{sid}/edit", json={
        "action": "assert", "term": "vote()", "value": True})
    response = client.post(f"/session/{sid}/optimize",
                           json={"term": "age()", "direction": "minimize"})
    assert response.status_code == 200
    assert response.json()["value"] == 18


def test_models_endpoint(client, kb_id):
    sid = new_session(client, kb_id)
    client.post(f"/session/{sid}/edit", json={
        "action": "assert", "term": "age()", "value": 20})
    response = client.post(f"/session/{sid}/models", json={"max": 2})
    assert response.status_code == 200
    models = response.json()["models"]
    assert len(models) == 1
    assert models[0]["vote()"] is True


def test_retract_and_replay_determinism(client, kb_id):
    sid1 = new_session(client, kb_id)
    sid2 = new_session(client, kb_id)
    for sid in (sid1, sid2):
        client.post(f"/session/{sid}/edit", json={
            "action": "assert", "term": "vote()", "value": True})
        client.post(f"/session/{sid}/edit", json={
            "action": "retract", "term": "vote()"})
        client.post(f"/session/{sid}/edit", json={
            "action": "assert", "term": "age()", "value": 30})
    s1 = client.get(f"/session/{sid1}/state").json()
    s2 = client.get(f"/session/{sid2}/state").json()
    assert s1 == s2


def test_delete_session(client, kb_id):
    sid = new_session(client, kb_id)
    assert client.delete(f"/session/{sid}").status_code == 204
    assert client.get(f"/session/{sid}/state").status_code == 404


def test_invalid_action_422(client, kb_id):
    sid = new_session(client, kb_id)
    response = client.post(f"/session/{sid}/edit", json={
        "action": "toggle", "term": "vote()"})
    assert response.status_code == 422


def test_retract_without_assert_422(client, kb_id):
    sid = new_session(client, kb_id)
    response = client.post(f"/session/{sid}/edit", json={
        "action": "retract", "term": "vote()"})
    assert response.status_code == 422
