"""Shared fixtures: the worked FluBot example and its expected outputs."""
from __future__ import annotations

import pytest

from ctiner import DocumentText, EntityMention, FLAIR, TRANSFORMER

FLUBOT_TEXT = (
    "Proofpoint report mentions that the German-language messages were turned "
    "off once the UK messages were established, indicating a conscious effort "
    "to spread FluBot 446833e3f8b04d4c3c2d2288e456328266524e396adbfeba3769d007"
    "27481e80 in Android phones."
)

FLUBOT_HASH = "446833e3f8b04d4c3c2d2288e456328266524e396adbfeba3769d00727481e80"

TRANSFORMER_PREDICTIONS = (
    ("Proofpoint", "Organization", 0, 10, 0.82),
    ("FluBot", "Malware", 156, 162, 0.92),
    (FLUBOT_HASH, "Indicator", 163, 227, 0.90),
    ("Android", "System", 231, 238, 1.00),
)

FLAIR_PREDICTIONS = (
    ("German-language", "MISC", 36, 51, 1.00),
    ("UK", "LOC", 86, 88, 1.00),
)

TRANSFORMER_ONLY_LINES = [
    "Mention: Proofpoint, Class: Organization, Start: 0, End: 10, Confidence: 0.82",
    "Mention: FluBot, Class: Malware, Start: 156, End: 162, Confidence: 0.92",
    f"Mention: {FLUBOT_HASH}, Class: Indicator, Start: 163, End: 227, Confidence: 0.90",
    "Mention: Android, Class: System, Start: 231, End: 238, Confidence: 1.00",
]

WITH_HEURISTIC_LINES = [
    f"Mention: {FLUBOT_HASH}, Class: SHA256, Start: 163, End: 227, Confidence: 1.00",
    "Mention: Proofpoint, Class: Organization, Start: 0, End: 10, Confidence: 0.82",
    "Mention: FluBot, Class: Malware, Start: 156, End: 162, Confidence: 0.92",
    "Mention: Android, Class: System, Start: 231, End: 238, Confidence: 1.00",
]

WITH_FLAIR_LINES = WITH_HEURISTIC_LINES + [
    "Mention: German-language, Class: MISC, Start: 36, End: 51, Confidence: 1.00",
    "Mention: UK, Class: LOC, Start: 86, End: 88, Confidence: 1.00",
]

# The worked fine-tuning example sentence in CoNLL form.
CONLL_SAMPLE = """Proofpoint\tB-Organization
wrote\tO
about\tO
the\tO
DroidJack\tB-Malware
RAT\tI-Malware
side-loaded\tO
with\tO
Pokemon\tB-System
GO\tI-System
. O
"""

CONLL_SAMPLE_TAGS = [
    "B-Organization", "O", "O", "O", "B-Malware", "I-Malware",
    "O", "O", "B-System", "I-System", "O",
]


@pytest.fixture
def flubot_doc() -> DocumentText:
    return DocumentText("text", FLUBOT_TEXT)


def make_mentions(doc: DocumentText, rows, source) -> list[EntityMention]:
    return [
        EntityMention(mention, label, start, end, conf, source)
        for mention, label, start, end, conf in rows
    ]


@pytest.fixture
def transformer_mentions(flubot_doc) -> list[EntityMention]:
    return make_mentions(flubot_doc, TRANSFORMER_PREDICTIONS, TRANSFORMER)


@pytest.fixture
def flair_mentions(flubot_doc) -> list[EntityMention]:
    return make_mentions(flubot_doc, FLAIR_PREDICTIONS, FLAIR)
