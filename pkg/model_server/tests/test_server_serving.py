from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from model_server import CheckpointLoadError, build_app
from model_server.serving import Predictor

SAMPLE = "Proofpoint found FluBot in Android phones."


@pytest.fixture(scope="module")
def client(checkpoint):
    return TestClient(build_app(checkpoint))


def test_health(client):
    response = client.get("/v1/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_predict_wire_shape(client):
    response = client.post("/v1/predict", json={"doc_id": "d1", "text": SAMPLE})
    assert response.status_code == 200
    payload = response.json()
    assert isinstance(payload["model_name"], str)
    assert isinstance(payload["entities"], list)
    for entity in payload["entities"]:
        assert set(entity) == {"mention", "label", "start", "end", "confidence"}
        assert SAMPLE[entity["start"] : entity["end"]] == entity["mention"]
        assert 0.0 <= entity["confidence"] <= 1.0
        assert entity["start"] < entity["end"]


def test_predict_deterministic(client):
    first = client.post("/v1/predict", json={"doc_id": "a", "text": SAMPLE}).json()
    second = client.post("/v1/predict", json={"doc_id": "b", "text": SAMPLE}).json()
    assert first == second


def test_predict_empty_text(client):
    response = client.post("/v1/predict", json={"doc_id": "e", "text": ""})
    assert response.status_code == 200
    assert response.json()["entities"] == []


def test_malformed_requests(client):
    response = client.post("/v1/predict", json={"doc_id": "x"})
    assert response.status_code == 400
    assert "error" in response.json()

    response = client.post("/v1/predict", json={"text": "hi"})
    assert response.status_code == 400
    assert "error" in response.json()

    response = client.post("/v1/predict", json={"doc_id": 1, "text": "hi"})
    assert response.status_code == 400

    response = client.post(
        "/v1/predict", content=b"{not json", headers={"Content-Type": "application/json"}
    )
    assert response.status_code == 400
    assert "error" in response.json()

    response = client.post("/v1/predict", json=["wrong", "shape"])
    assert response.status_code == 400


def test_offsets_survive_punctuation_and_subwords(checkpoint):
    predictor = Predictor(checkpoint)
    text = "FluBot, unseenword99 and Android."
    for entity in predictor.predict(text):
        assert text[entity["start"] : entity["end"]] == entity["mention"]


def test_checkpoint_load_error(tmp_path):
    with pytest.raises(CheckpointLoadError):
        build_app(tmp_path / "not-a-checkpoint")
