"""Clients for external NER prediction backends over a small wire protocol.

Protocol (UTF-8 JSON bodies):
  POST <endpoint>/v1/predict   {"doc_id": str, "text": str}
    -> {"model_name": str, "entities": [{"mention","label","start","end","confidence"}]}
  GET  <endpoint>/v1/health    -> {"status": "ok"}

Besides http(s) endpoints, two in-process transports exist so the engine
and its tests need no ML runtime: ``mock_backend()`` wraps a scripted
doc_id -> mentions map, and ``mock:<path.json>`` endpoints read the same
script from a JSON file (used by the CLI). All transports share one
response validation path: a mention violating the span invariants is
rejected with a protocol error, never silently repaired.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .model import (
    BadConfidence,
    CtinerError,
    DocumentText,
    EmptySpan,
    EntityMention,
    OffsetOutOfRange,
    SourceId,
    TRANSFORMER,
    new_mention,
)


class BackendError(CtinerError):
    """Base class for gateway failures."""


class Timeout(BackendError):
    """The backend did not answer within the descriptor's timeout."""


class ConnectionFailed(BackendError):
    """The backend endpoint could not be reached."""


class MalformedResponse(BackendError):
    """The response violates the wire schema or the span invariants."""


class OffsetMismatch(BackendError):
    """A response mention's text is not the substring at its offsets."""


@dataclass(frozen=True)
class BackendDescriptor:
    """Where and how to reach one prediction backend."""

    source: SourceId
    endpoint: str
    timeout: float = 10.0
    label_map: Mapping[str, str] | None = None
    handler: Callable[[dict], dict] | None = None  # in-process transport

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class PredictionResponse:
    model_name: str
    entities: tuple[EntityMention, ...]
    latency: float


@dataclass(frozen=True)
class HealthStatus:
    ready: bool
    reason: str | None = None


def build_request(doc: DocumentText) -> dict:
    return {"doc_id": doc.doc_id, "text": doc.text}


def serialize_entity(m: EntityMention) -> dict:
    """Wire form of one entity (source is implied by the backend)."""
    return {
        "mention": m.mention,
        "label": m.label,
        "start": m.start,
        "end": m.end,
        "confidence": m.confidence,
    }


def mock_backend(
    script: Mapping[str, Sequence[EntityMention]],
    source: SourceId = TRANSFORMER,
    model_name: str = "mock",
) -> BackendDescriptor:
    """A deterministic in-process backend serving scripted predictions.

    Unscripted doc_ids yield an empty entity list. Responses go through the
    same validation as HTTP responses, so a request round-trip reproduces
    the scripted mentions verbatim.
    """
    table = {doc_id: [serialize_entity(m) for m in mentions] for doc_id, mentions in script.items()}

    def handle(request: dict) -> dict:
        return {"model_name": model_name, "entities": list(table.get(request["doc_id"], []))}

    return BackendDescriptor(source=source, endpoint=f"mock:{model_name}", handler=handle)


def _load_mock_script(path: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConnectionFailed(f"mock script {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedResponse(f"mock script {path!r}: {exc}") from exc
    if not isinstance(payload, dict):
        raise MalformedResponse(f"mock script {path!r}: expected an object")
    return payload


def _http_post(url: str, body: dict, timeout: float) -> dict:
    import requests

    try:
        response = requests.post(url, json=body, timeout=timeout)
    except requests.exceptions.Timeout as exc:
        raise Timeout(f"POST {url}: {exc}") from exc
    except requests.exceptions.ConnectionError as exc:
        raise ConnectionFailed(f"POST {url}: {exc}") from exc
    if response.status_code != 200:
        raise MalformedResponse(f"POST {url}: HTTP {response.status_code}")
    try:
        return response.json()
    except ValueError as exc:
        raise MalformedResponse(f"POST {url}: body is not JSON") from exc


def _transport(backend: BackendDescriptor, request: dict) -> dict:
    if backend.handler is not None:
        return backend.handler(request)
    if backend.endpoint.startswith("mock:"):
        script = _load_mock_script(backend.endpoint[len("mock:"):])
        entities = script.get(request["doc_id"], [])
        return {"model_name": "mock", "entities": entities}
    url = backend.endpoint.rstrip("/") + "/v1/predict"
    return _http_post(url, request, backend.timeout)


def _parse_entities(
    payload: dict, doc: DocumentText, backend: BackendDescriptor
) -> list[EntityMention]:
    if not isinstance(payload, dict):
        raise MalformedResponse("response is not an object")
    entities = payload.get("entities")
    model_name = payload.get("model_name")
    if not isinstance(model_name, str) or not isinstance(entities, list):
        raise MalformedResponse("response must carry 'model_name' and 'entities'")

    label_map = backend.label_map or {}
    mentions: list[EntityMention] = []
    for i, entry in enumerate(entities):
        if not isinstance(entry, dict):
            raise MalformedResponse(f"entity {i}: not an object")
        try:
            claimed = entry["mention"]
            label = entry["label"]
            start = entry["start"]
            end = entry["end"]
            confidence = entry["confidence"]
        except KeyError as exc:
            raise MalformedResponse(f"entity {i}: missing key {exc}") from exc
        if (
            not isinstance(claimed, str)
            or not isinstance(label, str)
            or not isinstance(start, int)
            or not isinstance(end, int)
            or isinstance(start, bool)
            or isinstance(end, bool)
            or isinstance(confidence, bool)
            or not isinstance(confidence, (int, float))
        ):
            raise MalformedResponse(f"entity {i}: mistyped field")
        try:
            mention = new_mention(
                doc, label_map.get(label, label), start, end, confidence, backend.source
            )
        except (OffsetOutOfRange, EmptySpan, BadConfidence) as exc:
            raise MalformedResponse(f"entity {i}: {exc}") from exc
        if mention.mention != claimed:
            raise OffsetMismatch(
                f"entity {i}: claims {claimed!r} at [{start},{end}) "
                f"but document reads {mention.mention!r}"
            )
        mentions.append(mention)
    return mentions


def fetch_prediction(backend: BackendDescriptor, doc: DocumentText) -> PredictionResponse:
    """One predict round-trip, returning validated mentions plus latency."""
    started = time.perf_counter()
    payload = _transport(backend, build_request(doc))
    latency = time.perf_counter() - started
    mentions = _parse_entities(payload, doc, backend)
    return PredictionResponse(
        model_name=payload["model_name"], entities=tuple(mentions), latency=latency
    )


def request_entities(backend: BackendDescriptor, doc: DocumentText) -> list[EntityMention]:
    """Fetch predictions for one document; mentions carry the backend's source."""
    return list(fetch_prediction(backend, doc).entities)


def health_check(backend: BackendDescriptor) -> HealthStatus:
    """Probe the backend's health route; never raises."""
    if backend.handler is not None:
        return HealthStatus(ready=True)
    if backend.endpoint.startswith("mock:"):
        try:
            _load_mock_script(backend.endpoint[len("mock:"):])
        except BackendError as exc:
            return HealthStatus(ready=False, reason=f"{type(exc).__name__}: {exc}")
        return HealthStatus(ready=True)

    import requests

    url = backend.endpoint.rstrip("/") + "/v1/health"
    try:
        response = requests.get(url, timeout=backend.timeout)
        body = response.json()
    except requests.exceptions.Timeout as exc:
        return HealthStatus(ready=False, reason=f"Timeout: {exc}")
    except requests.exceptions.ConnectionError as exc:
        return HealthStatus(ready=False, reason=f"ConnectionFailed: {exc}")
    except ValueError:
        return HealthStatus(ready=False, reason="MalformedResponse: body is not JSON")
    if response.status_code != 200 or body != {"status": "ok"}:
        return HealthStatus(
            ready=False, reason=f"MalformedResponse: HTTP {response.status_code} {body!r}"
        )
    return HealthStatus(ready=True)
