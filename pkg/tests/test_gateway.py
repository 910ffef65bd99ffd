from __future__ import annotations

import json
import random
import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from ctiner import (
    BackendDescriptor,
    DocumentText,
    FLAIR,
    TRANSFORMER,
    health_check,
    mock_backend,
    request_entities,
)
from ctiner.gateway import (
    ConnectionFailed,
    MalformedResponse,
    OffsetMismatch,
    Timeout,
    fetch_prediction,
    serialize_entity,
)



def test_mock_backend_roundtrip_identity(flubot_doc, transformer_mentions):
    backend = mock_backend({flubot_doc.doc_id: transformer_mentions})
    got = request_entities(backend, flubot_doc)
    assert got == transformer_mentions


def test_mock_backend_unscripted_doc(flubot_doc, transformer_mentions):
    backend = mock_backend({flubot_doc.doc_id: transformer_mentions})
    other = DocumentText("other", "nothing to see")
    assert request_entities(backend, other) == []


def test_mock_backend_generic_labels_pass_through(flubot_doc, flair_mentions):
    backend = mock_backend({flubot_doc.doc_id: flair_mentions}, source=FLAIR)
    got = request_entities(backend, flubot_doc)
    assert [(m.label, m.start, m.end) for m in got] == [
        ("MISC", 36, 51),
        ("LOC", 86, 88),
    ]


def test_empty_text_document():
    backend = mock_backend({})
    assert request_entities(backend, DocumentText("e", "")) == []


def test_label_map_applied(flubot_doc, flair_mentions):
    def handle(request):
        return {
            "model_name": "m",
            "entities": [serialize_entity(m) for m in flair_mentions],
        }

    backend = BackendDescriptor(
        source=FLAIR, endpoint="mock:m", handler=handle, label_map={"LOC": "Location"}
    )
    got = request_entities(backend, flubot_doc)
    assert [m.label for m in got] == ["MISC", "Location"]


def _handler_backend(payload, source=TRANSFORMER):
    return BackendDescriptor(source=source, endpoint="mock:x", handler=lambda req: payload)


def test_offset_mismatch(flubot_doc):
    payload = {
        "model_name": "m",
        "entities": [
            {"mention": "FluBot", "label": "Malware", "start": 0, "end": 6, "confidence": 0.9}
        ],
    }
    with pytest.raises(OffsetMismatch):
        request_entities(_handler_backend(payload), flubot_doc)


CORRUPT_PAYLOADS = [
    ["not", "an", "object"],
    {},
    {"model_name": "m"},
    {"entities": []},
    {"model_name": 3, "entities": []},
    {"model_name": "m", "entities": {}},
    {"model_name": "m", "entities": ["x"]},
    {"model_name": "m", "entities": [{}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": "Organization", "start": 0, "end": 10}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": "Organization", "start": "0", "end": 10, "confidence": 0.5}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": "Organization", "start": 0.0, "end": 10, "confidence": 0.5}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": "Organization", "start": False, "end": 10, "confidence": 0.5}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": None, "start": 0, "end": 10, "confidence": 0.5}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": "Organization", "start": 0, "end": 10, "confidence": True}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": "Organization", "start": 0, "end": 10, "confidence": 1.5}]},
    {"model_name": "m", "entities": [{"mention": "Proofpoint", "label": "Organization", "start": 0, "end": 10, "confidence": -0.1}]},
    {"model_name": "m", "entities": [{"mention": "", "label": "Organization", "start": 5, "end": 5, "confidence": 0.5}]},
    {"model_name": "m", "entities": [{"mention": "x", "label": "Organization", "start": 10, "end": 5, "confidence": 0.5}]},
    {"model_name": "m", "entities": [{"mention": "x", "label": "Organization", "start": 0, "end": 10_000, "confidence": 0.5}]},
    {"model_name": "m", "entities": [{"mention": "x", "label": "Organization", "start": -1, "end": 3, "confidence": 0.5}]},
]


@pytest.mark.parametrize("payload", CORRUPT_PAYLOADS)
def test_corrupt_payloads_rejected(flubot_doc, payload):
    with pytest.raises(MalformedResponse):
        request_entities(_handler_backend(payload), flubot_doc)


def test_fuzzed_responses_never_leak_invalid_mentions(flubot_doc):
    """Randomly corrupted payloads either raise a protocol error or yield
    mentions that all satisfy the span invariants."""
    rng = random.Random(1312)
    base_entity = {
        "mention": "Proofpoint",
        "label": "Organization",
        "start": 0,
        "end": 10,
        "confidence": 0.82,
    }
    junk = [None, True, -3, 2.5, "", "xyz", [], {}, 10**9]
    for _ in range(500):
        entity = dict(base_entity)
        for _ in range(rng.randrange(1, 3)):
            key = rng.choice(list(entity))
            if rng.random() < 0.4:
                del entity[key]
            else:
                entity[key] = rng.choice(junk)
        payload = {"model_name": "m", "entities": [entity]}
        try:
            got = request_entities(_handler_backend(payload), flubot_doc)
        except (MalformedResponse, OffsetMismatch):
            continue
        for m in got:
            assert 0 <= m.start < m.end <= len(flubot_doc.text)
            assert flubot_doc.text[m.start : m.end] == m.mention
            assert 0.0 <= m.confidence <= 1.0


def test_fetch_prediction_carries_model_name_and_latency(flubot_doc, transformer_mentions):
    backend = mock_backend({flubot_doc.doc_id: transformer_mentions}, model_name="tiny")
    response = fetch_prediction(backend, flubot_doc)
    assert response.model_name == "tiny"
    assert response.latency >= 0.0
    assert list(response.entities) == transformer_mentions


def test_mock_script_file_backend(tmp_path, flubot_doc, transformer_mentions):
    script = {
        flubot_doc.doc_id: [serialize_entity(m) for m in transformer_mentions]
    }
    path = tmp_path / "script.json"
    path.write_text(json.dumps(script), encoding="utf-8")
    backend = BackendDescriptor(source=TRANSFORMER, endpoint=f"mock:{path}")
    assert request_entities(backend, flubot_doc) == transformer_mentions
    assert health_check(backend).ready


def test_mock_script_file_missing(flubot_doc):
    backend = BackendDescriptor(source=TRANSFORMER, endpoint="mock:/no/such/file.json")
    with pytest.raises(ConnectionFailed):
        request_entities(backend, flubot_doc)
    status = health_check(backend)
    assert not status.ready
    assert "ConnectionFailed" in status.reason


def test_health_check_mock_ready(flubot_doc, transformer_mentions):
    backend = mock_backend({flubot_doc.doc_id: transformer_mentions})
    assert health_check(backend) == health_check(backend)
    assert health_check(backend).ready


# --- live HTTP transport -----------------------------------------------------


class _Protocol(BaseHTTPRequestHandler):
    script: dict = {}
    health_delay = 0.0

    def _reply(self, payload, status=200):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if self.path != "/v1/predict":
            self._reply({"error": "no such route"}, status=404)
            return
        length = int(self.headers.get("Content-Length", 0))
        request = json.loads(self.rfile.read(length))
        entities = self.script.get(request.get("doc_id"), [])
        self._reply({"model_name": "live-test", "entities": entities})

    def do_GET(self):
        if self.health_delay:
            time.sleep(self.health_delay)
        if self.path == "/v1/health":
            self._reply({"status": "ok"})
        else:
            self._reply({"error": "no such route"}, status=404)

    def log_message(self, *args):
        pass


@pytest.fixture
def live_server(flubot_doc, transformer_mentions):
    handler = type(
        "Handler",
        (_Protocol,),
        {"script": {flubot_doc.doc_id: [serialize_entity(m) for m in transformer_mentions]}},
    )
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}", handler
    server.shutdown()


def test_http_roundtrip(live_server, flubot_doc, transformer_mentions):
    endpoint, _ = live_server
    backend = BackendDescriptor(source=TRANSFORMER, endpoint=endpoint, timeout=5.0)
    assert request_entities(backend, flubot_doc) == transformer_mentions
    assert health_check(backend).ready


def test_http_closed_port_unready(flubot_doc):
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    backend = BackendDescriptor(
        source=TRANSFORMER, endpoint=f"http://127.0.0.1:{port}", timeout=2.0
    )
    status = health_check(backend)
    assert not status.ready
    assert "ConnectionFailed" in status.reason
    with pytest.raises(ConnectionFailed):
        request_entities(backend, flubot_doc)


def test_http_slow_backend_times_out(live_server):
    endpoint, handler = live_server
    handler.health_delay = 1.0
    backend = BackendDescriptor(source=TRANSFORMER, endpoint=endpoint, timeout=0.2)
    status = health_check(backend)
    handler.health_delay = 0.0
    assert not status.ready
    assert "Timeout" in status.reason


def test_descriptor_requires_positive_timeout():
    with pytest.raises(ValueError):
        BackendDescriptor(source=TRANSFORMER, endpoint="http://x", timeout=0.0)
