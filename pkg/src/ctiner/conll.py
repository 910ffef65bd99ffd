"""CoNLL-2003-style corpus reading/writing, BIO tag conversion, statistics.

File format, bit-exact on write: ``<token>\\t<tag>`` lines, a blank line
after every sentence, ``-DOCSTART-\\t O`` between documents, UTF-8. Reading
is liberal: columns split on any whitespace run, ``-DOCSTART-`` lines of any
column count end a document, and repeated blank lines collapse.

Document text is reconstructed by joining tokens with single spaces within a
sentence and newlines between sentences, so offsets are synthetic for
corpora read from CoNLL and exact for corpora built from raw text.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .model import CYBER_CLASSES, CtinerError, DocumentText, EntityMention

_TAG_RE = re.compile(r"O|[BI]-.+")
_DOCSTART = "-DOCSTART-"


class MalformedLine(CtinerError):
    """A CoNLL line does not have exactly two columns."""


class BadTagSyntax(CtinerError):
    """A tag is not ``O`` or ``B-<class>`` / ``I-<class>``."""


class EmptyInput(CtinerError):
    """The stream contains no tokens."""


class MisalignedSpan(CtinerError):
    """A mention boundary cuts through a token."""


class OverlappingMentions(CtinerError):
    """Two mentions passed to spans_to_bio overlap."""


class DanglingITag(CtinerError):
    """Strict decoding found an I- tag with no valid predecessor."""


class TypeSwitchInsideEntity(CtinerError):
    """Strict decoding found an I- tag whose class differs from the open entity."""


@dataclass(frozen=True)
class Token:
    """A surface token with offsets into the (reconstructed) document text."""

    surface: str
    start: int
    end: int


Sentence = tuple[tuple[Token, ...], tuple[str, ...]]


@dataclass(frozen=True)
class TaggedDocument:
    doc_id: str
    sentences: tuple[Sentence, ...]

    @property
    def observed_classes(self) -> set[str]:
        classes = set()
        for _, tags in self.sentences:
            for tag in tags:
                if tag != "O":
                    classes.add(tag[2:])
        return classes

    def token_count(self) -> int:
        return sum(len(tokens) for tokens, _ in self.sentences)

    def text(self) -> str:
        """Reconstructed document text the token offsets point into."""
        return "\n".join(
            " ".join(tok.surface for tok in tokens) for tokens, _ in self.sentences
        )


@dataclass(frozen=True)
class Corpus:
    splits: Mapping[str, Sequence[TaggedDocument]]


@dataclass(frozen=True)
class SplitStats:
    tokens: int
    entities: dict[str, int]

    @property
    def total_entities(self) -> int:
        return sum(self.entities.values())


@dataclass(frozen=True)
class StatsReport:
    per_split: dict[str, SplitStats]

    @property
    def total_tokens(self) -> int:
        return sum(s.tokens for s in self.per_split.values())

    @property
    def total_entities(self) -> int:
        return sum(s.total_entities for s in self.per_split.values())

    def classes(self) -> list[str]:
        observed = set()
        for stats in self.per_split.values():
            observed.update(stats.entities)
        extra = sorted(observed - set(CYBER_CLASSES))
        return list(CYBER_CLASSES) + extra


def _check_tag(tag: str, where: str) -> str:
    if not _TAG_RE.fullmatch(tag):
        raise BadTagSyntax(f"{where}: bad tag {tag!r}")
    return tag


def read_conll(lines: Iterable[str], doc_id_prefix: str = "doc") -> list[TaggedDocument]:
    """Parse a CoNLL line stream into tagged documents.

    Raises MalformedLine for non-blank lines without exactly two columns,
    BadTagSyntax for tags outside the BIO syntax, and EmptyInput when the
    stream holds no tokens at all.
    """
    docs: list[TaggedDocument] = []
    sentences: list[Sentence] = []
    surfaces: list[str] = []
    tags: list[str] = []
    offset = 0  # running offset into the reconstructed document text

    def end_sentence() -> None:
        nonlocal offset
        if not surfaces:
            return
        tokens = []
        pos = offset
        for i, surface in enumerate(surfaces):
            if i:
                pos += 1  # single space between tokens
            tokens.append(Token(surface, pos, pos + len(surface)))
            pos += len(surface)
        offset = pos + 1  # newline between sentences
        sentences.append((tuple(tokens), tuple(tags)))
        surfaces.clear()
        tags.clear()

    def end_document() -> None:
        nonlocal offset
        end_sentence()
        if sentences:
            docs.append(TaggedDocument(f"{doc_id_prefix}-{len(docs)}", tuple(sentences)))
            sentences.clear()
        offset = 0

    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            end_sentence()
            continue
        if line.split()[0] == _DOCSTART:
            end_document()
            continue
        columns = line.split()
        if len(columns) != 2:
            raise MalformedLine(
                f"line {lineno}: expected 2 columns, got {len(columns)}: {line!r}"
            )
        surface, tag = columns
        surfaces.append(surface)
        tags.append(_check_tag(tag, f"line {lineno}"))
    end_document()

    if not docs:
        raise EmptyInput("no tokens in input")
    return docs


def read_conll_file(path: str | Path, doc_id_prefix: str | None = None) -> list[TaggedDocument]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return read_conll(fh, doc_id_prefix=doc_id_prefix or path.stem)


def write_conll(docs: Sequence[TaggedDocument]) -> Iterator[str]:
    """Yield CoNLL lines (no trailing newlines) for ``docs``.

    read_conll(write_conll(docs)) reproduces token/tag content exactly;
    offsets are reconstructed.
    """
    for index, doc in enumerate(docs):
        if index:
            yield f"{_DOCSTART}\tO"
            yield ""
        for tokens, tags in doc.sentences:
            for token, tag in zip(tokens, tags):
                yield f"{token.surface}\t{tag}"
            yield ""


def write_conll_file(path: str | Path, docs: Sequence[TaggedDocument]) -> None:
    Path(path).write_text("\n".join(write_conll(docs)) + "\n", encoding="utf-8")


def whitespace_tokens(text: str) -> list[Token]:
    """Tokenize on whitespace runs, keeping character offsets."""
    return [
        Token(m.group(), m.start(), m.end()) for m in re.finditer(r"\S+", text)
    ]


def spans_to_bio(
    doc: DocumentText,
    mentions: Sequence[EntityMention],
    token_boundaries: Sequence[Token] | None = None,
) -> list[str]:
    """Project character-span mentions onto BIO tags over the given tokens.

    Every mention must cover a union of whole tokens (MisalignedSpan
    otherwise) and mentions must be pairwise non-overlapping. Tokens default
    to whitespace tokenization of the document text.
    """
    tokens = list(token_boundaries) if token_boundaries is not None else whitespace_tokens(doc.text)
    tags = ["O"] * len(tokens)
    start_index = {tok.start: i for i, tok in enumerate(tokens)}
    end_index = {tok.end: i for i, tok in enumerate(tokens)}

    ordered = sorted(mentions, key=lambda m: (m.start, m.end))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start < prev.end:
            raise OverlappingMentions(
                f"{prev.mention!r} [{prev.start},{prev.end}) overlaps "
                f"{cur.mention!r} [{cur.start},{cur.end})"
            )
    for m in ordered:
        first = start_index.get(m.start)
        last = end_index.get(m.end)
        if first is None or last is None or last < first:
            raise MisalignedSpan(
                f"mention {m.mention!r} [{m.start},{m.end}) does not align to token boundaries"
            )
        tags[first] = f"B-{m.label}"
        for i in range(first + 1, last + 1):
            tags[i] = f"I-{m.label}"
    return tags


def bio_to_spans(
    tokens: Sequence,
    tags: Sequence[str],
    mode: str = "lenient",
) -> list[tuple[str, int, int]]:
    """Decode BIO tags into (class, token_start, token_end_exclusive) spans.

    Lenient mode treats an I-X with no valid predecessor as B-X (the default
    convention of span-level evaluators); strict mode raises DanglingITag or
    TypeSwitchInsideEntity instead.
    """
    if len(tokens) != len(tags):
        raise ValueError(f"{len(tokens)} tokens vs {len(tags)} tags")
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown mode {mode!r}")

    spans: list[tuple[str, int, int]] = []
    open_class: str | None = None
    open_start = 0
    for i, tag in enumerate(tags):
        _check_tag(tag, f"position {i}")
        if tag == "O":
            if open_class is not None:
                spans.append((open_class, open_start, i))
                open_class = None
            continue
        prefix, cls = tag[0], tag[2:]
        if prefix == "B":
            if open_class is not None:
                spans.append((open_class, open_start, i))
            open_class, open_start = cls, i
        else:  # I-
            if open_class is None:
                if mode == "strict":
                    raise DanglingITag(f"I-{cls} at position {i} with no open entity")
                open_class, open_start = cls, i
            elif open_class != cls:
                if mode == "strict":
                    raise TypeSwitchInsideEntity(
                        f"I-{cls} at position {i} inside {open_class} entity"
                    )
                spans.append((open_class, open_start, i))
                open_class, open_start = cls, i
    if open_class is not None:
        spans.append((open_class, open_start, len(tags)))
    return spans


def corpus_stats(corpus: Corpus) -> StatsReport:
    """Token and per-class entity counts per split (lenient span decoding)."""
    per_split: dict[str, SplitStats] = {}
    for split, docs in corpus.splits.items():
        tokens = 0
        entities: dict[str, int] = {}
        for doc in docs:
            for sent_tokens, tags in doc.sentences:
                tokens += len(sent_tokens)
                for cls, _, _ in bio_to_spans(sent_tokens, tags, mode="lenient"):
                    entities[cls] = entities.get(cls, 0) + 1
        per_split[split] = SplitStats(tokens=tokens, entities=entities)
    return StatsReport(per_split=per_split)
