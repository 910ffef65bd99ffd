"""Serve a fine-tuned checkpoint over the prediction wire protocol.

Routes, matching the engine's gateway contract exactly:
  POST /v1/predict   {"doc_id": str, "text": str}
    -> {"model_name": str, "entities": [{"mention","label","start","end","confidence"}]}
  GET  /v1/health    -> {"status": "ok"}

Subword predictions are decoded at the word level: the first subword of
each word carries its BIO tag and probability, entity spans map back to
character offsets through the tokenizer's offset mapping, and entity
confidence is the arithmetic mean of the constituent words' label
probabilities. Malformed requests get a 400 with an ``{"error": ...}``
object; inference runs in eval mode with no sampling, so responses are
deterministic for a fixed checkpoint.
"""
from pathlib import Path

import torch

from .tags import decode_bio


class CheckpointLoadError(RuntimeError):
    """The checkpoint directory cannot be loaded as a token classifier."""


class Predictor:
    def __init__(self, checkpoint: str | Path):
        from transformers.utils import logging as hf_logging

        hf_logging.set_verbosity_error()
        hf_logging.disable_progress_bar()
        from transformers import AutoModelForTokenClassification, AutoTokenizer

        checkpoint = Path(checkpoint)
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(checkpoint)
            self.model = AutoModelForTokenClassification.from_pretrained(checkpoint)
        except Exception as exc:
            raise CheckpointLoadError(f"cannot load checkpoint {checkpoint}: {exc}") from exc
        self.model.eval()
        self.model_name = checkpoint.resolve().name
        self.id2label = {int(k): v for k, v in self.model.config.id2label.items()}

    def predict(self, text: str) -> list[dict]:
        """Wire-format entities for one document text."""
        if not text.strip():
            return []
        encoded = self.tokenizer(
            text, return_offsets_mapping=True, truncation=True, return_tensors="pt"
        )
        with torch.no_grad():
            logits = self.model(
                input_ids=encoded["input_ids"], attention_mask=encoded["attention_mask"]
            ).logits
        probabilities = torch.softmax(logits, dim=-1)[0]
        offsets = encoded["offset_mapping"][0].tolist()

        # group subwords into words; keep each word's first subword position
        words: list[dict] = []
        previous = None
        for position, word_id in enumerate(encoded.word_ids(0)):
            if word_id is None:
                continue
            if word_id != previous:
                words.append(
                    {"first": position, "start": offsets[position][0], "end": offsets[position][1]}
                )
                previous = word_id
            else:
                words[-1]["end"] = offsets[position][1]

        word_tags: list[str] = []
        word_probs: list[float] = []
        for word in words:
            label_id = int(probabilities[word["first"]].argmax())
            word_tags.append(self.id2label[label_id])
            word_probs.append(float(probabilities[word["first"], label_id]))

        entities = []
        for cls, first_word, last_word in decode_bio(word_tags):
            start = words[first_word]["start"]
            end = words[last_word - 1]["end"]
            if start >= end:
                continue
            confidence = sum(word_probs[first_word:last_word]) / (last_word - first_word)
            entities.append(
                {
                    "mention": text[start:end],
                    "label": cls,
                    "start": start,
                    "end": end,
                    "confidence": confidence,
                }
            )
        return entities


def build_app(checkpoint: str | Path):
    """FastAPI application serving the given checkpoint."""
    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse

    predictor = Predictor(checkpoint)
    app = FastAPI(title="ctiner model server", version="0.1.0")

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/predict")
    async def predict(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return JSONResponse({"error": "request body is not JSON"}, status_code=400)
        if not isinstance(payload, dict):
            return JSONResponse({"error": "request must be an object"}, status_code=400)
        doc_id = payload.get("doc_id")
        text = payload.get("text")
        if not isinstance(doc_id, str):
            return JSONResponse({"error": "missing or non-string 'doc_id'"}, status_code=400)
        if not isinstance(text, str):
            return JSONResponse({"error": "missing or non-string 'text'"}, status_code=400)
        return {"model_name": predictor.model_name, "entities": predictor.predict(text)}

    return app


def serve(checkpoint: str | Path, port: int, host: str = "127.0.0.1") -> None:
    """Run the server until interrupted."""
    import uvicorn

    uvicorn.run(build_app(checkpoint), host=host, port=port, log_level="warning")
