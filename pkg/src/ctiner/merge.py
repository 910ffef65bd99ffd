"""Combine per-source entity lists into one conflict-free list by priority.

The policy is an ordered source list, highest priority first, usually parsed
from a code string such as "HTFS" (heuristic, transformer, flair, spacy).
A mention is accepted iff it overlaps no already-accepted mention, visiting
sources in priority order and each source's mentions in position order. The
output keeps mentions grouped by priority rank and sorted by start offset
within each group, matching how merged predictions are printed; use
sort_by_position() for document order instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import (
    BUILTIN_SOURCES,
    CtinerError,
    DuplicateSourceCode,
    EntityMention,
    SourceId,
    overlaps,
)


class UnknownSourceCode(CtinerError):
    """A priority code letter has no registered source."""


class InconsistentSource(CtinerError):
    """A mention is filed under a source key that does not match its source field."""


@dataclass(frozen=True)
class MergePolicy:
    """Ordered list of sources, highest priority first."""

    order: tuple[SourceId, ...]

    def __post_init__(self) -> None:
        if not self.order:
            raise ValueError("merge policy must list at least one source")
        codes = [s.code for s in self.order]
        if len(set(codes)) != len(codes):
            raise DuplicateSourceCode(f"duplicate sources in policy: {codes}")


@dataclass(frozen=True)
class MergeInput:
    """Per-source mention lists for one document."""

    per_source: Mapping[SourceId, Sequence[EntityMention]] = field(default_factory=dict)

    def validated(self) -> "MergeInput":
        for source, mentions in self.per_source.items():
            for m in mentions:
                if m.source != source:
                    raise InconsistentSource(
                        f"mention {m.mention!r} from {m.source.name} filed under {source.name}"
                    )
        return self


def parse_priority(code: str, available: Iterable[SourceId]) -> MergePolicy:
    """Turn a priority code like "HTFS" into a MergePolicy over ``available``.

    Letters resolve against the built-in sources plus ``available``, so the
    default "HTFS" stays valid when only some of those sources are enabled
    (a coded-but-unavailable source simply contributes no mentions).
    Available sources missing from the code are appended after all coded
    ones, in registration order (the iteration order of ``available``).
    """
    if not code:
        raise ValueError("priority code must be non-empty")
    enabled: dict[str, SourceId] = {}
    for src in available:
        existing = enabled.get(src.code)
        if existing is not None and existing != src:
            raise DuplicateSourceCode(f"two sources share code {src.code!r}")
        enabled.setdefault(src.code, src)
    registered = {src.code: src for src in BUILTIN_SOURCES}
    registered.update(enabled)

    order: list[SourceId] = []
    seen: set[str] = set()
    for letter in code:
        if letter in seen:
            raise DuplicateSourceCode(f"letter {letter!r} appears twice in {code!r}")
        seen.add(letter)
        src = registered.get(letter)
        if src is None:
            raise UnknownSourceCode(f"no source registered for code {letter!r}")
        order.append(src)
    for src in enabled.values():
        if src.code not in seen:
            order.append(src)
    return MergePolicy(tuple(order))


def _position_key(m: EntityMention) -> tuple:
    # Total order within a source so the merge result is insensitive to input
    # permutation even for degenerate same-span inputs.
    return (m.start, m.end, m.label, -m.confidence, m.mention)


def merge(input: MergeInput, policy: MergePolicy) -> list[EntityMention]:
    """Select a conflict-free subset of the input mentions under the policy.

    Sources are visited in priority order and their mentions by (start, end);
    a mention is kept iff it overlaps nothing already kept. Kept mentions are
    returned grouped by priority rank, sorted by start within each group.
    """
    input.validated()
    accepted_groups: list[list[EntityMention]] = []
    accepted: list[EntityMention] = []
    for source in policy.order:
        group: list[EntityMention] = []
        for m in sorted(input.per_source.get(source, ()), key=_position_key):
            if all(not overlaps(m, kept) for kept in accepted):
                accepted.append(m)
                group.append(m)
        accepted_groups.append(group)
    result: list[EntityMention] = []
    for group in accepted_groups:
        result.extend(sorted(group, key=lambda m: m.start))
    return result


def sort_by_position(mentions: Sequence[EntityMention]) -> list[EntityMention]:
    """Reorder a merged result into document order."""
    return sorted(mentions, key=lambda m: (m.start, m.end))
