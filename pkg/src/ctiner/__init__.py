"""Entity extraction engine for cyber threat intelligence text.

Combines regex-based indicator-of-compromise heuristics, predictions from
external NER backends, and a deterministic priority-based span merger, with
CoNLL/BIO corpus tooling and a span-level micro-F1 evaluator.
"""
from .conll import (
    Corpus,
    StatsReport,
    TaggedDocument,
    Token,
    bio_to_spans,
    corpus_stats,
    read_conll,
    read_conll_file,
    spans_to_bio,
    whitespace_tokens,
    write_conll,
    write_conll_file,
)
from .evaluation import EvalReport, confusion_summary, evaluate, render_report
from .gateway import (
    BackendDescriptor,
    HealthStatus,
    health_check,
    mock_backend,
    request_entities,
)
from .heuristics import (
    HeuristicConfig,
    PatternSpec,
    builtin_patterns,
    export_patterns,
    extract_iocs,
    load_patterns,
    normalize_defang,
)
from .merge import MergeInput, MergePolicy, merge, parse_priority, sort_by_position
from .model import (
    BUILTIN_SOURCES,
    CYBER_CLASSES,
    FLAIR,
    HEURISTIC,
    SPACY,
    TRANSFORMER,
    DocumentText,
    EntityMention,
    SourceId,
    SourceRegistry,
    new_mention,
    overlaps,
)
from .pipeline import PipelineConfig, extract_pipeline, render_text

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SOURCES",
    "BackendDescriptor",
    "CYBER_CLASSES",
    "Corpus",
    "DocumentText",
    "EntityMention",
    "EvalReport",
    "FLAIR",
    "HEURISTIC",
    "HealthStatus",
    "HeuristicConfig",
    "MergeInput",
    "MergePolicy",
    "PatternSpec",
    "PipelineConfig",
    "SPACY",
    "SourceId",
    "SourceRegistry",
    "StatsReport",
    "TRANSFORMER",
    "TaggedDocument",
    "Token",
    "bio_to_spans",
    "builtin_patterns",
    "confusion_summary",
    "corpus_stats",
    "evaluate",
    "export_patterns",
    "extract_iocs",
    "extract_pipeline",
    "health_check",
    "load_patterns",
    "merge",
    "mock_backend",
    "new_mention",
    "normalize_defang",
    "overlaps",
    "parse_priority",
    "read_conll",
    "read_conll_file",
    "render_report",
    "render_text",
    "request_entities",
    "sort_by_position",
    "spans_to_bio",
    "whitespace_tokens",
    "write_conll",
    "write_conll_file",
]
