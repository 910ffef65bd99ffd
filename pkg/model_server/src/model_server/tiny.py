"""Build a tiny randomly initialized BERT-style base model from a corpus.

Offline stand-in for a hub checkpoint: a WordPiece vocabulary is collected
from the corpus tokens and a two-layer encoder saved in the standard
pretrained-directory format, so ``finetune`` can consume it through the
same ``transformers_model`` path as any published model. Useful for smoke
tests and air-gapped environments; it has no pretraining, so expect toy
quality.
"""
from __future__ import annotations

from pathlib import Path

from .conll import load_dataset

_SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


def build_tiny_pretrained(
    corpus_dir: str | Path,
    out_dir: str | Path,
    hidden_size: int = 32,
    num_layers: int = 2,
    num_heads: int = 2,
    max_seq_length: int = 128,
) -> Path:
    import torch
    from transformers import BertConfig, BertModel, BertTokenizerFast
    from transformers.utils import logging as hf_logging

    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()

    words: set[str] = set()
    for docs in load_dataset(corpus_dir).values():
        for doc in docs:
            for tokens, _ in doc:
                words.update(token.lower() for token in tokens)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    vocab_path = out_dir / "vocab.txt"
    vocab_path.write_text("\n".join(_SPECIALS + sorted(words)) + "\n", encoding="utf-8")

    tokenizer = BertTokenizerFast(vocab_file=str(vocab_path), do_lower_case=True)
    tokenizer.model_max_length = max_seq_length

    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=hidden_size,
        num_hidden_layers=num_layers,
        num_attention_heads=num_heads,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=max_seq_length,
    )
    BertModel(config).save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir
