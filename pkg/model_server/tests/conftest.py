"""Session fixtures: a synthetic five-class corpus, a tiny offline base model,
and a one-epoch fine-tuned checkpoint shared across the serving tests."""
from __future__ import annotations

import pytest

from model_server import TrainConfig, finetune
from model_server.tiny import build_tiny_pretrained

TRAIN_DOCS = [
    [
        ("FluBot B-Malware", "spread O", "in O", "Android B-System", "phones O"),
        ("Proofpoint B-Organization", "reported O", "the O", "campaign O"),
    ],
    [
        ("the O", "DroidJack B-Malware", "RAT I-Malware", "contacted O", "evil.com B-Indicator"),
        ("patch O", "CVE-2012-2825 B-Vulnerability", "now O"),
    ],
    [
        ("Skygofree B-Malware", "targets O", "Android B-System", "devices O"),
        ("Kaspersky B-Organization", "wrote O", "about O", "it O"),
    ],
    [
        ("the O", "dropper O", "beacons O", "to O", "10.0.0.1 B-Indicator"),
        ("exploits O", "CVE-2019-0708 B-Vulnerability", "on O", "Windows B-System"),
    ],
    [
        ("Anubis B-Malware", "abuses O", "Adobe B-System", "Flash I-System"),
        ("Symantec B-Organization", "observed O", "the O", "hash O"),
    ],
]

DEV_DOCS = [
    [
        ("FluBot B-Malware", "infects O", "Android B-System", "phones O"),
    ],
]

TEST_DOCS = [
    [
        ("Proofpoint B-Organization", "found O", "FluBot B-Malware", "in O", "Android B-System"),
        ("it O", "contacted O", "evil.com B-Indicator", "daily O"),
    ],
    [
        ("the O", "RAT O", "exploits O", "CVE-2012-2825 B-Vulnerability"),
    ],
]


def _render(docs) -> str:
    lines = []
    for index, doc in enumerate(docs):
        if index:
            lines.append("-DOCSTART-\tO")
            lines.append("")
        for sentence in doc:
            for pair in sentence:
                token, tag = pair.split(" ")
                lines.append(f"{token}\t{tag}")
            lines.append("")
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    corpus = tmp_path_factory.mktemp("corpus")
    (corpus / "train.txt").write_text(_render(TRAIN_DOCS), encoding="utf-8")
    (corpus / "valid.txt").write_text(_render(DEV_DOCS), encoding="utf-8")
    (corpus / "test.txt").write_text(_render(TEST_DOCS), encoding="utf-8")
    return corpus


@pytest.fixture(scope="session")
def tiny_base(tmp_path_factory, corpus_dir):
    return build_tiny_pretrained(corpus_dir, tmp_path_factory.mktemp("tiny-base"), max_seq_length=64)


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory, corpus_dir, tiny_base):
    config = TrainConfig(
        checkpoint_dir=str(tmp_path_factory.mktemp("ckpt")),
        dataset=str(corpus_dir),
        transformers_model=str(tiny_base),
        lr=1e-3,
        epochs=1,
        max_seq_length=64,
        batch_size=8,
    )
    return finetune(config)
