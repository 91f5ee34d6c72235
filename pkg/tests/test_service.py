"""HTTP service contracts: sessions, parse, generate, apply, undo, health."""
import json
import random
import threading
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from sdm.encoding.config import EncoderConfig
from sdm.geometry import build_random_model, dumps_model
from sdm.net import SdmNet
from sdm.service import UNDO_DEPTH, ServiceConfig, create_app

CUBE = json.loads((Path(__file__).parent / "fixtures" / "unit_cube.json").read_text())

MOVE_SLOT = {"commands": [
    {"feature": {"type": "rect_through_slot"},
     "operation": {"type": "move",
                   "parameters": {"axis": "X", "sign": "+", "distance_mm": 3.0}}}],
    "verified": True}


def _canon(mesh: dict) -> str:
    return json.dumps(mesh, sort_keys=True)


@pytest.fixture()
def client():
    return TestClient(create_app(ServiceConfig()))


@pytest.fixture()
def session(client):
    """Session over the 15-face slot+pocket model; slot faces are 8..10."""
    model = build_random_model("m1", random.Random(3),
                               ["rect_through_slot", "rect_pocket"])
    resp = client.post("/sessions", json={"model": json.loads(dumps_model(model))})
    assert resp.status_code == 201
    return resp.json()["session_id"]


def test_health(client):
    got = client.get("/health").json()
    assert got["status"] == "ok"
    assert got["checkpoint_loaded"] is False
    assert got["llm_configured"] is False


def test_create_session_from_upload(client):
    resp = client.post("/sessions", json={"model": CUBE})
    assert resp.status_code == 201
    body = resp.json()
    assert len(body["mesh"]["faces"]) == 6
    other = client.post("/sessions", json={"model": CUBE})
    assert other.json()["session_id"] != body["session_id"]


def test_create_session_synthetic(client):
    resp = client.post("/sessions",
                       json={"synthetic": {"seed": 3, "types": ["slot"]}})
    assert resp.status_code == 201
    assert len(resp.json()["mesh"]["faces"]) >= 7


def test_create_session_rejects_bad_bodies(client):
    bad_model = {"format": "nonsense"}
    resp = client.post("/sessions", json={"model": bad_model})
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "invalid_model" and body["detail"]

    resp = client.post("/sessions", json={"something": 1})
    assert resp.status_code == 400

    resp = client.post("/sessions", content="{broken",
                       headers={"content-type": "application/json"})
    assert resp.status_code == 400
    assert resp.json()["code"] == "bad_request"

    resp = client.post("/sessions",
                       json={"synthetic": {"seed": 1, "types": ["warp"]}})
    assert resp.status_code == 400


def test_session_limit():
    client = TestClient(create_app(ServiceConfig(session_limit=2)))
    for _ in range(2):
        assert client.post("/sessions", json={"model": CUBE}).status_code == 201
    resp = client.post("/sessions", json={"model": CUBE})
    assert resp.status_code == 507
    assert resp.json()["code"] == "session_limit"


def test_parse_grammar(client, session):
    resp = client.post(f"/sessions/{session}/parse",
                       json={"text": "delete the circular through hole"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["source"] == "grammar"
    assert body["structured"]["commands"][0]["operation"]["type"] == "delete"

    resp = client.post(f"/sessions/{session}/parse",
                       json={"text": "make it nicer"})
    assert resp.status_code == 422
    body = resp.json()
    assert body["code"] == "parse_failure" and "clause 1" in body["detail"]


def test_parse_is_side_effect_free(client, session):
    before = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    client.post(f"/sessions/{session}/parse", json={"text": "move the slot 3mm up"})
    after = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    assert _canon(before) == _canon(after)


def test_parse_errors(client, session):
    assert client.post("/sessions/none/parse",
                       json={"text": "x"}).status_code == 404
    resp = client.post(f"/sessions/{session}/parse",
                       json={"text": "move it", "engine": "llm"})
    assert resp.status_code == 503
    assert resp.json()["code"] == "llm_unconfigured"
    assert client.post(f"/sessions/{session}/parse",
                       json={"text": "x", "engine": "psychic"}).status_code == 400
    assert client.post(f"/sessions/{session}/parse",
                       json={}).status_code == 400


def test_generate_without_checkpoint(client, session):
    resp = client.post(f"/sessions/{session}/generate",
                       json={"seed_face_id": 8, "feature_type": "slot"})
    assert resp.status_code == 409
    assert resp.json()["code"] == "no_checkpoint"


@pytest.fixture()
def gen_client():
    net = SdmNet(EncoderConfig(d_model=16, encoder_layers=1, heads=2,
                               feed_forward_dim=32, dropout=0.0))
    return TestClient(create_app(ServiceConfig(), net=net))


def test_generate_contract(gen_client):
    sid = gen_client.post(
        "/sessions",
        json={"synthetic": {"seed": 3,
                            "types": ["rect_through_slot", "rect_pocket"]}},
    ).json()["session_id"]

    resp = gen_client.post(f"/sessions/{sid}/generate",
                           json={"seed_face_id": 8, "feature_type": "slot"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["feature_type"] == "rect_through_slot"
    ids = body["face_ids"]
    assert 8 in ids
    assert len(ids) == len(set(ids))
    assert all(1 <= i <= 15 for i in ids)

    for bad_seed in (0, 16, "3", None):
        resp = gen_client.post(f"/sessions/{sid}/generate",
                               json={"seed_face_id": bad_seed,
                                     "feature_type": "slot"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "bad_seed"

    resp = gen_client.post(f"/sessions/{sid}/generate",
                           json={"seed_face_id": 8, "feature_type": "warp"})
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "unknown_feature_type"
    assert "rect_through_slot" in str(body["detail"])

    assert gen_client.post("/sessions/none/generate",
                           json={"seed_face_id": 1,
                                 "feature_type": "slot"}).status_code == 404


def test_apply_moves_only_target_faces(client, session):
    before = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    resp = client.post(f"/sessions/{session}/apply",
                       json={"command": MOVE_SLOT, "face_ids": [8, 9, 10]})
    assert resp.status_code == 200
    body = resp.json()
    assert body["summary"]["changed_face_ids"] == [8, 9, 10]
    assert body["summary"]["api_calls"][0]["function"] == "move_faces"
    after = body["mesh"]
    for b, a in zip(before["faces"], after["faces"]):
        if b["id"] in (8, 9, 10):
            for tb, ta in zip(b["triangles"], a["triangles"]):
                for vb, va in zip(tb["v"], ta["v"]):
                    assert va[0] == vb[0] + 3.0
                    assert va[1:] == vb[1:]
        else:
            assert _canon(a) == _canon(b)


def test_apply_then_undo_restores_exactly(client, session):
    before = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    client.post(f"/sessions/{session}/apply",
                json={"command": MOVE_SLOT, "face_ids": [8, 9, 10]})
    undone = client.post(f"/sessions/{session}/undo")
    assert undone.status_code == 200
    assert _canon(undone.json()["mesh"]) == _canon(before)
    assert _canon(client.get(f"/sessions/{session}/mesh").json()["mesh"]) \
        == _canon(before)


def test_apply_error_statuses(client, session):
    bad_schema = {"commands": [{"feature": {"type": "slot"},
                                "operation": {"type": "move",
                                              "parameters": {"axis": "X"}}}]}
    resp = client.post(f"/sessions/{session}/apply",
                       json={"command": bad_schema, "face_ids": [8]})
    assert resp.status_code == 400
    assert resp.json()["code"] == "schema_violation"
    assert isinstance(resp.json()["detail"], list)

    resp = client.post(f"/sessions/{session}/apply",
                       json={"command": MOVE_SLOT, "face_ids": [99]})
    assert resp.status_code == 400
    assert resp.json()["code"] == "bad_face_ids"

    resp = client.post(f"/sessions/{session}/apply",
                       json={"command": MOVE_SLOT, "face_ids": []})
    assert resp.status_code == 400

    assert client.post("/sessions/none/apply",
                       json={"command": MOVE_SLOT,
                             "face_ids": [8]}).status_code == 404


def test_apply_delete_all_is_409_and_state_unchanged(client, session):
    before = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    delete_all = {"commands": [
        {"feature": {"type": "rect_through_slot"},
         "operation": {"type": "delete", "parameters": {}}}], "verified": True}
    resp = client.post(f"/sessions/{session}/apply",
                       json={"command": delete_all,
                             "face_ids": list(range(1, 16))})
    assert resp.status_code == 409
    assert resp.json()["code"] == "edit_failed"
    after = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    assert _canon(after) == _canon(before)
    # failed apply must not leave an undo entry behind
    assert client.post(f"/sessions/{session}/undo").status_code == 409


def test_undo_empty_and_depth(client, session):
    resp = client.post(f"/sessions/{session}/undo")
    assert resp.status_code == 409 and resp.json()["code"] == "undo_empty"

    snapshots = [client.get(f"/sessions/{session}/mesh").json()["mesh"]]
    for _ in range(UNDO_DEPTH + 5):
        got = client.post(f"/sessions/{session}/apply",
                          json={"command": MOVE_SLOT, "face_ids": [8, 9, 10]})
        assert got.status_code == 200
        snapshots.append(got.json()["mesh"])

    for back in range(UNDO_DEPTH):
        got = client.post(f"/sessions/{session}/undo")
        assert got.status_code == 200
        assert _canon(got.json()["mesh"]) == _canon(snapshots[-(back + 2)])
    # stack depth is bounded: the oldest five snapshots are unreachable
    assert client.post(f"/sessions/{session}/undo").status_code == 409


def test_mesh_unknown_session(client):
    assert client.get("/sessions/none/mesh").status_code == 404


def test_concurrent_applies_serialize(client, session):
    errors = []

    def hammer():
        try:
            for _ in range(8):
                r = client.post(f"/sessions/{session}/apply",
                                json={"command": MOVE_SLOT,
                                      "face_ids": [8, 9, 10]})
                assert r.status_code == 200
        except Exception as exc:  # noqa: BLE001 - collected for the main thread
            errors.append(exc)

    before = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    threads = [threading.Thread(target=hammer) for _ in range(3)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    after = client.get(f"/sessions/{session}/mesh").json()["mesh"]
    # 24 serialized moves of +3 each land exactly 72 along X
    v_before = before["faces"][7]["triangles"][0]["v"][0]
    v_after = after["faces"][7]["triangles"][0]["v"][0]
    assert v_after[0] == pytest.approx(v_before[0] + 72.0, abs=1e-9)


def test_config_from_env():
    cfg = ServiceConfig.from_env({"SDM_PORT": "9001", "SDM_SESSION_LIMIT": "5",
                                  "SDM_LLM_ENDPOINT": "http://localhost:1234",
                                  "SDM_CHECKPOINT": ""})
    assert cfg.port == 9001 and cfg.session_limit == 5
    assert cfg.llm_endpoint == "http://localhost:1234"
    assert cfg.checkpoint_path is None
    with pytest.raises(ValueError):
        ServiceConfig(port=0)
