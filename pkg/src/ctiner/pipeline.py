"""End-to-end extraction: heuristics plus backends, merged under a priority code."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .gateway import BackendDescriptor, BackendError, request_entities
from .heuristics import HeuristicConfig, PatternSpec, extract_iocs
from .merge import MergeInput, MergePolicy, merge, parse_priority
from .model import HEURISTIC, DocumentText, EntityMention, SourceId

log = logging.getLogger(__name__)

OUTPUT_FORMATS = ("text", "json", "conll")


@dataclass(frozen=True)
class PipelineConfig:
    """Which sources run, how conflicts resolve, and how results render."""

    use_heuristic: bool = True
    backends: tuple[BackendDescriptor, ...] = ()
    priority_code: str = "HTFS"
    defang: bool = False
    skip_unready: bool = False
    output_format: str = "text"
    patterns: tuple[PatternSpec, ...] | None = None  # None = builtin registry

    def __post_init__(self) -> None:
        if not self.use_heuristic and not self.backends:
            raise ValueError("at least one source must be enabled")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")
        self.policy()  # priority code must parse against the enabled sources

    def sources(self) -> list[SourceId]:
        enabled = [HEURISTIC] if self.use_heuristic else []
        enabled.extend(b.source for b in self.backends)
        return enabled

    def policy(self) -> MergePolicy:
        return parse_priority(self.priority_code, self.sources())

    def heuristic_config(self) -> HeuristicConfig:
        if self.patterns is None:
            return HeuristicConfig(defang_normalization=self.defang)
        return HeuristicConfig(defang_normalization=self.defang, registry=self.patterns)


def extract_pipeline(doc: DocumentText, config: PipelineConfig) -> list[EntityMention]:
    """Run every enabled source on ``doc`` and merge by the config's priority.

    Backend errors propagate (fail fast) unless ``skip_unready`` is set, in
    which case the failing source is logged and contributes nothing.
    """
    per_source: dict[SourceId, list[EntityMention]] = {}
    if config.use_heuristic:
        per_source[HEURISTIC] = extract_iocs(doc, config.heuristic_config())
    for backend in config.backends:
        try:
            per_source[backend.source] = request_entities(backend, doc)
        except BackendError as exc:
            if not config.skip_unready:
                raise
            log.warning("skipping backend %s: %s", backend.source.name, exc)
            per_source[backend.source] = []
    return merge(MergeInput(per_source), config.policy())


def render_text(mentions: Sequence[EntityMention]) -> list[str]:
    """One line per mention, confidence printed to two decimals."""
    return [
        f"Mention: {m.mention}, Class: {m.label}, Start: {m.start}, "
        f"End: {m.end}, Confidence: {m.confidence:.2f}"
        for m in mentions
    ]
