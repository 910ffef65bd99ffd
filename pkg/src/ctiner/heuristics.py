"""Indicator-of-compromise extraction via a registry of named regex patterns.

Each pattern carries an output label, a precedence rank (lower = stronger),
and a boundary mode controlling how it anchors against surrounding text:

* ``word-boundary`` — the match may not be flanked by ``[0-9a-zA-Z]``, so no
  match is a strict infix of a longer alphanumeric token. This is also what
  keeps a 40-hex prefix of a 64-hex digest from matching as SHA1, and a
  128-hex blob from splitting into two SHA256 hits.
* ``anchored-adapted`` — the stored pattern body was rewritten from a fully
  anchored (``^...$``) source form so it works mid-sentence; it compiles with
  the same flanking rules as ``word-boundary``.
* ``raw`` — compiled as written, no flanking assertions.

Overlap resolution across patterns: longest match wins, ties broken by
precedence rank, remaining ties by earliest start. Output is non-overlapping
and sorted by start offset.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .model import HEURISTIC, CtinerError, DocumentText, EntityMention, new_mention

BOUNDARY_MODES = ("word-boundary", "anchored-adapted", "raw")

# Flanking assertions for word-boundary / anchored-adapted modes.
_LEFT_GUARD = r"(?<![0-9a-zA-Z])"
_RIGHT_GUARD = r"(?![0-9a-zA-Z])"


class UnknownPatternName(CtinerError):
    """HeuristicConfig enables a pattern name absent from the registry."""


class BadPatternTable(CtinerError):
    """A plain-text pattern table line cannot be parsed."""


@dataclass(frozen=True)
class PatternSpec:
    """A named, compiled indicator pattern with its output label and rank."""

    name: str
    pattern: str
    precedence: int
    boundary_mode: str = "word-boundary"

    def __post_init__(self) -> None:
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ValueError(f"unknown boundary mode {self.boundary_mode!r}")
        re.compile(self.pattern)  # the source itself must compile, pre-wrapping
        self.compiled()

    def compiled(self) -> re.Pattern:
        return _compile(self.pattern, self.boundary_mode)


@lru_cache(maxsize=256)
def _compile(pattern: str, boundary_mode: str) -> re.Pattern:
    if boundary_mode == "raw":
        return re.compile(pattern)
    return re.compile(f"{_LEFT_GUARD}(?:{pattern}){_RIGHT_GUARD}")


# Builtin registry. SHA256/SHA1/CVE/IPv4/Email/FilePath are the classic
# CTI detection templates (CVE with ASCII hyphens and the sequence number
# widened to {4,7} for post-2014 ids; IPv4 de-anchored so mid-sentence
# addresses match). MD5 mirrors the other hash rows at 32 chars, URL is
# the conservative scheme-prefixed form with trailing punctuation
# excluded, DomainName is dotted labels ending in a 2-24 letter TLD.
_BUILTINS = (
    PatternSpec("SHA256", r"[a-f0-9]{64}|[A-F0-9]{64}", 0),
    PatternSpec("SHA1", r"[a-f0-9]{40}|[A-F0-9]{40}", 1),
    PatternSpec("MD5", r"[a-f0-9]{32}|[A-F0-9]{32}", 2),
    PatternSpec("CVE", r"CVE-[0-9]{4}-[0-9]{4,7}", 3),
    PatternSpec(
        "IPv4",
        r"((25[0-5]|(2[0-4]|1\d|[1-9]|)\d)\.){3}(25[0-5]|(2[0-4]|1\d|[1-9]|)\d)",
        4,
        "anchored-adapted",
    ),
    PatternSpec("Email", r"[a-z][_a-z0-9-.]+@[a-z0-9-]+[a-z]+", 5),
    PatternSpec("URL", r"https?://[^\s]*[^\s.,;:!?)\]}>'\"]", 6),
    PatternSpec(
        "DomainName",
        r"(?:[a-zA-Z0-9](?:[a-zA-Z0-9-]{0,61}[a-zA-Z0-9])?\.)+[a-zA-Z]{2,24}",
        7,
    ),
    PatternSpec("FilePath", r"[a-zA-Z]:\\([0-9a-zA-Z]+)|(\/[^\s\n]+)+", 8),
)


def builtin_patterns() -> list[PatternSpec]:
    """The builtin indicator patterns, strongest precedence first."""
    return list(_BUILTINS)


@dataclass(frozen=True)
class HeuristicConfig:
    """Extraction options: which patterns run and whether defanged text is normalized."""

    enabled_patterns: frozenset[str] | None = None  # None = all
    defang_normalization: bool = False
    registry: tuple[PatternSpec, ...] = _BUILTINS

    def active_patterns(self) -> list[PatternSpec]:
        known = {spec.name for spec in self.registry}
        if self.enabled_patterns is None:
            return list(self.registry)
        missing = set(self.enabled_patterns) - known
        if missing:
            raise UnknownPatternName(f"not in registry: {sorted(missing)}")
        return [spec for spec in self.registry if spec.name in self.enabled_patterns]


def normalize_defang(text: str) -> tuple[str, tuple[int, ...]]:
    """Rewrite defanged indicator syntax and return an offset map back to the original.

    Replaces ``hxxp`` -> ``http`` and ``[.]`` / ``(.)`` -> ``.`` case-insensitively.
    The returned map has one entry per normalized character plus a sentinel, such
    that normalized span [s, e) corresponds to original span [map[s], map[e]).
    """
    out: list[str] = []
    offsets: list[int] = []
    pos = 0
    for m in _DEFANG_RE.finditer(text):
        for i in range(pos, m.start()):
            out.append(text[i])
            offsets.append(i)
        token = m.group().lower()
        if token == "hxxp":
            out.extend("http")
            offsets.extend(range(m.start(), m.start() + 4))
        else:  # "[.]" or "(.)"
            out.append(".")
            offsets.append(m.start())
        pos = m.end()
    for i in range(pos, len(text)):
        out.append(text[i])
        offsets.append(i)
    offsets.append(len(text))
    return "".join(out), tuple(offsets)


_DEFANG_RE = re.compile(r"hxxp|\[\.\]|\(\.\)", re.IGNORECASE)


def project_span(offset_map: Sequence[int], start: int, end: int) -> tuple[int, int]:
    """Map a span in normalized coordinates back to original-text coordinates."""
    return offset_map[start], offset_map[end]


def _resolve_overlaps(candidates: list[tuple[int, int, int, str]]) -> list[tuple[int, int, str]]:
    """Keep a non-overlapping subset: longest first, then precedence, then start."""
    accepted: list[tuple[int, int, str]] = []
    for start, end, _, name in sorted(
        candidates, key=lambda c: (-(c[1] - c[0]), c[2], c[0])
    ):
        if all(e <= start or end <= s for s, e, _ in accepted):
            accepted.append((start, end, name))
    accepted.sort()
    return accepted


def extract_iocs(
    text: DocumentText, config: HeuristicConfig | None = None
) -> list[EntityMention]:
    """Extract indicator mentions from ``text``.

    Pure function of (text, config). Every mention carries the heuristic
    source with confidence 1.0 and its pattern name as label; the result is
    pairwise non-overlapping and sorted by start offset.
    """
    config = config or HeuristicConfig()
    specs = config.active_patterns()

    if config.defang_normalization:
        haystack, offset_map = normalize_defang(text.text)
    else:
        haystack, offset_map = text.text, None

    candidates: list[tuple[int, int, int, str]] = []
    for spec in specs:
        for m in spec.compiled().finditer(haystack):
            if m.start() < m.end():
                candidates.append((m.start(), m.end(), spec.precedence, spec.name))

    mentions = []
    for start, end, name in _resolve_overlaps(candidates):
        if offset_map is not None:
            start, end = project_span(offset_map, start, end)
        mentions.append(new_mention(text, name, start, end, 1.0, HEURISTIC))
    return mentions


def export_patterns(specs: Iterable[PatternSpec]) -> str:
    """Render a registry as a plain-text table (re-importable with load_patterns)."""
    lines = ["# name\tprecedence\tboundary_mode\tpattern"]
    for spec in specs:
        lines.append(f"{spec.name}\t{spec.precedence}\t{spec.boundary_mode}\t{spec.pattern}")
    return "\n".join(lines) + "\n"


def load_patterns(table: str) -> list[PatternSpec]:
    """Parse a plain-text pattern table; validates names, ranks, and regex syntax."""
    specs: list[PatternSpec] = []
    for lineno, line in enumerate(table.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t", 3)
        if len(parts) != 4:
            raise BadPatternTable(f"line {lineno}: expected 4 tab-separated columns")
        name, rank, mode, pattern = parts
        try:
            spec = PatternSpec(name, pattern, int(rank), mode)
        except (ValueError, re.error) as exc:
            raise BadPatternTable(f"line {lineno}: {exc}") from exc
        specs.append(spec)
    names = [s.name for s in specs]
    ranks = [s.precedence for s in specs]
    if len(set(names)) != len(names):
        raise BadPatternTable("duplicate pattern names")
    if len(set(ranks)) != len(ranks):
        raise BadPatternTable("duplicate precedence ranks")
    return specs
