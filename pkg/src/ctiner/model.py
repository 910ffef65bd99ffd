"""Core value types shared across the extraction engine.

Entity mentions are labeled character spans over a document, indexed by
Unicode code points with an exclusive end offset. All types here are
immutable after construction and safe to share between threads.
"""
from __future__ import annotations

from dataclasses import dataclass


class CtinerError(Exception):
    """Base class for all errors raised by this package."""


class OffsetOutOfRange(CtinerError):
    """Span offsets fall outside the document or are inverted."""


class EmptySpan(CtinerError):
    """Span has zero length (start == end)."""


class BadConfidence(CtinerError):
    """Confidence is outside [0, 1]."""


class DuplicateSourceCode(CtinerError):
    """Two registered sources share a priority code letter."""


# The five annotation classes used for corpus validation. Backends may emit
# labels outside this set (e.g. MISC, LOC); those pass through unvalidated.
CYBER_CLASSES = ("Malware", "Indicator", "System", "Organization", "Vulnerability")


def is_cyber_class(label: str) -> bool:
    return label in CYBER_CLASSES


@dataclass(frozen=True)
class SourceId:
    """An extraction source: a single uppercase priority code letter plus a name."""

    code: str
    name: str

    def __post_init__(self) -> None:
        if len(self.code) != 1 or not self.code.isalpha() or not self.code.isupper():
            raise ValueError(f"source code must be a single uppercase letter: {self.code!r}")
        if not self.name:
            raise ValueError("source name must be non-empty")


HEURISTIC = SourceId("H", "heuristic")
TRANSFORMER = SourceId("T", "transformer")
FLAIR = SourceId("F", "flair")
SPACY = SourceId("S", "spacy")

BUILTIN_SOURCES = (HEURISTIC, TRANSFORMER, FLAIR, SPACY)


class SourceRegistry:
    """Ordered registry of sources; registration order is the fallback priority order."""

    def __init__(self, sources: tuple[SourceId, ...] = BUILTIN_SOURCES):
        self._by_code: dict[str, SourceId] = {}
        for src in sources:
            self.register(src)

    def register(self, source: SourceId) -> SourceId:
        existing = self._by_code.get(source.code)
        if existing is not None and existing != source:
            raise DuplicateSourceCode(
                f"code {source.code!r} already registered for {existing.name!r}"
            )
        self._by_code[source.code] = source
        return source

    def by_code(self, code: str) -> SourceId | None:
        return self._by_code.get(code)

    def __iter__(self):
        return iter(self._by_code.values())

    def __contains__(self, source: SourceId) -> bool:
        return self._by_code.get(source.code) == source


@dataclass(frozen=True)
class DocumentText:
    """A raw report text, character-indexed, with a stable id."""

    doc_id: str
    text: str

    def __len__(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class EntityMention:
    """A labeled character span: ``mention`` is the exact substring at [start, end)."""

    mention: str
    label: str
    start: int
    end: int
    confidence: float
    source: SourceId

    def to_dict(self) -> dict:
        """Canonical serialized form used by the wire protocol and CLI output."""
        return {
            "mention": self.mention,
            "label": self.label,
            "start": self.start,
            "end": self.end,
            "confidence": self.confidence,
            "source": self.source.name,
        }


def new_mention(
    text: DocumentText,
    label: str,
    start: int,
    end: int,
    confidence: float,
    source: SourceId,
) -> EntityMention:
    """Build a validated EntityMention whose mention text is sliced from ``text``.

    Raises OffsetOutOfRange, EmptySpan, or BadConfidence when the arguments
    violate the span invariants.
    """
    if start == end:
        raise EmptySpan(f"zero-length span at {start} in {text.doc_id!r}")
    if start < 0 or end > len(text.text) or start > end:
        raise OffsetOutOfRange(
            f"span [{start}, {end}) outside document {text.doc_id!r} of length {len(text.text)}"
        )
    if not 0.0 <= confidence <= 1.0:
        raise BadConfidence(f"confidence {confidence} not in [0, 1]")
    return EntityMention(
        mention=text.text[start:end],
        label=label,
        start=start,
        end=end,
        confidence=float(confidence),
        source=source,
    )


def overlaps(a: EntityMention, b: EntityMention) -> bool:
    """True iff the two spans share at least one character position."""
    return max(a.start, b.start) < min(a.end, b.end)
