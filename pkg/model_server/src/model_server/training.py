"""Fine-tune a pretrained transformer token classifier on CoNLL data.

Labels are assigned to the first subword of each corpus token; remaining
subwords and special tokens are masked out of the loss. After every epoch
the dev split (when present) is scored with span micro-F1 and a line is
appended to ``<checkpoint_dir>/training_log.jsonl``. Training is seeded,
so a fixed config and dataset reproduce the same checkpoint on CPU.
"""
from __future__ import annotations

import json
import logging
import random
from pathlib import Path

import torch

from .conll import load_dataset
from .config import TrainConfig
from .tags import span_micro_f1

log = logging.getLogger(__name__)

_SEED = 0


class DatasetNotFound(FileNotFoundError):
    """The dataset path is missing or holds no train split."""


class LabelMismatch(ValueError):
    """Dev/test tags use labels absent from the train split."""


def _flatten(docs) -> list[tuple[list[str], list[str]]]:
    return [(tokens, tags) for doc in docs for tokens, tags in doc]


def _label_inventory(sentences) -> list[str]:
    seen = {tag for _, tags in sentences for tag in tags}
    seen.discard("O")
    return ["O"] + sorted(seen)


def _quiet_transformers() -> None:
    from transformers.utils import logging as hf_logging

    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()


def _encode_batch(tokenizer, sentences, max_seq_length, label2id=None):
    tokens = [toks for toks, _ in sentences]
    encoded = tokenizer(
        tokens,
        is_split_into_words=True,
        truncation=True,
        max_length=max_seq_length,
        padding=True,
        return_tensors="pt",
    )
    if label2id is None:
        return encoded, None
    labels = torch.full(encoded["input_ids"].shape, -100, dtype=torch.long)
    for i, (_, tags) in enumerate(sentences):
        previous = None
        for position, word_id in enumerate(encoded.word_ids(i)):
            if word_id is None or word_id == previous:
                continue
            labels[i, position] = label2id[tags[word_id]]
            previous = word_id
    return encoded, labels


def _predict_tags(model, tokenizer, sentences, id2label, max_seq_length, batch_size):
    """Word-level predicted tags per sentence; truncated tails fall back to O."""
    model.eval()
    out: list[list[str]] = []
    with torch.no_grad():
        for i in range(0, len(sentences), batch_size):
            batch = sentences[i : i + batch_size]
            encoded, _ = _encode_batch(tokenizer, batch, max_seq_length)
            logits = model(
                input_ids=encoded["input_ids"], attention_mask=encoded["attention_mask"]
            ).logits
            predictions = logits.argmax(dim=-1)
            for j, (tokens, _) in enumerate(batch):
                tags = ["O"] * len(tokens)
                previous = None
                for position, word_id in enumerate(encoded.word_ids(j)):
                    if word_id is None or word_id == previous:
                        continue
                    tags[word_id] = id2label[int(predictions[j, position])]
                    previous = word_id
                out.append(tags)
    return out


def finetune(config: TrainConfig) -> Path:
    """Train per the config and return the checkpoint directory.

    Raises DatasetNotFound when the dataset path has no train split and
    LabelMismatch when dev/test tags fall outside the train label set.
    """
    _quiet_transformers()
    from transformers import AutoModelForTokenClassification, AutoTokenizer

    dataset_dir = Path(config.dataset)
    if not dataset_dir.exists():
        raise DatasetNotFound(f"dataset path {dataset_dir} does not exist")
    splits = load_dataset(dataset_dir)
    if "train" not in splits:
        raise DatasetNotFound(f"no train split found under {dataset_dir}")

    train = _flatten(splits["train"])
    labels = _label_inventory(train)
    label_set = set(labels)
    for split in ("dev", "test"):
        if split in splits:
            extra = {
                tag
                for _, tags in _flatten(splits[split])
                for tag in tags
                if tag not in label_set
            }
            if extra:
                raise LabelMismatch(f"{split} split uses unknown labels {sorted(extra)}")

    label2id = {label: i for i, label in enumerate(labels)}
    id2label = {i: label for label, i in label2id.items()}

    torch.manual_seed(_SEED)
    tokenizer = AutoTokenizer.from_pretrained(config.transformers_model)
    model = AutoModelForTokenClassification.from_pretrained(
        config.transformers_model,
        num_labels=len(labels),
        id2label=id2label,
        label2id=label2id,
    )

    optimizer = torch.optim.AdamW(model.parameters(), lr=config.resolved_lr())
    rng = random.Random(_SEED)
    checkpoint_dir = Path(config.checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)
    log_path = checkpoint_dir / "training_log.jsonl"

    dev = _flatten(splits["dev"]) if "dev" in splits else None
    with log_path.open("w", encoding="utf-8") as log_file:
        for epoch in range(1, config.epochs + 1):
            model.train()
            order = list(range(len(train)))
            rng.shuffle(order)
            total_loss = 0.0
            batches = 0
            for i in range(0, len(order), config.batch_size):
                batch = [train[k] for k in order[i : i + config.batch_size]]
                encoded, batch_labels = _encode_batch(
                    tokenizer, batch, config.max_seq_length, label2id
                )
                loss = model(
                    input_ids=encoded["input_ids"],
                    attention_mask=encoded["attention_mask"],
                    labels=batch_labels,
                ).loss
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                total_loss += float(loss.detach())
                batches += 1

            record = {"epoch": epoch, "train_loss": total_loss / max(batches, 1)}
            if dev:
                predicted = _predict_tags(
                    model, tokenizer, dev, id2label, config.max_seq_length, config.batch_size
                )
                record["dev_span_f1"] = span_micro_f1([tags for _, tags in dev], predicted)
            log_file.write(json.dumps(record) + "\n")
            log_file.flush()
            log.info("epoch %d: %s", epoch, record)

    model.save_pretrained(checkpoint_dir)
    tokenizer.save_pretrained(checkpoint_dir)
    return checkpoint_dir
