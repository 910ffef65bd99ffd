"""Command-line surface: extract entities, evaluate predictions, corpus stats.

Exit codes: 0 success, 1 usage error, 2 backend failure, 3 data-format error.
A JSON config file (``--config`` or the CTINER_CONFIG environment variable)
may carry backend endpoints and defaults; command-line flags override it.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import conll
from .evaluation import ShapeMismatch, evaluate, render_report, report_to_dict
from .gateway import BackendDescriptor, BackendError, health_check
from .heuristics import BadPatternTable, load_patterns
from .merge import UnknownSourceCode
from .model import (
    BUILTIN_SOURCES,
    DocumentText,
    DuplicateSourceCode,
    SourceId,
)
from .pipeline import OUTPUT_FORMATS, PipelineConfig, extract_pipeline, render_text

CONFIG_ENV_VAR = "CTINER_CONFIG"

_DATA_ERRORS = (
    conll.MalformedLine,
    conll.BadTagSyntax,
    conll.EmptyInput,
    conll.MisalignedSpan,
    conll.OverlappingMentions,
    ShapeMismatch,
    BadPatternTable,
)

_USAGE_ERRORS = (UnknownSourceCode, DuplicateSourceCode, ValueError)

_BACKEND_NAMES = {src.name: src for src in BUILTIN_SOURCES if src.name != "heuristic"}


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self._fail(message))

    def _fail(self, message: str) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _parse_backend_spec(spec: str, timeout: float) -> BackendDescriptor:
    """Parse ``name=endpoint`` (builtin names) or ``C:name=endpoint`` (custom code)."""
    head, sep, endpoint = spec.partition("=")
    if not sep or not endpoint or not head:
        raise ValueError(f"backend spec {spec!r}: expected name=endpoint")
    if ":" in head:
        code, _, name = head.partition(":")
        source = SourceId(code, name)
    else:
        source = _BACKEND_NAMES.get(head)
        if source is None:
            raise ValueError(
                f"backend spec {spec!r}: unknown builtin name {head!r}; "
                f"use one of {sorted(_BACKEND_NAMES)} or CODE:name=endpoint"
            )
    return BackendDescriptor(source=source, endpoint=endpoint, timeout=timeout)


def _load_config_file(path: str | None) -> dict:
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(payload, dict):
        raise ValueError(f"config {path!r}: expected a JSON object")
    return payload


def _config_backends(payload: dict) -> list[BackendDescriptor]:
    backends = []
    for entry in payload.get("backends", []):
        source = SourceId(entry["code"], entry["name"])
        backends.append(
            BackendDescriptor(
                source=source,
                endpoint=entry["endpoint"],
                timeout=float(entry.get("timeout", 10.0)),
                label_map=entry.get("label_map"),
            )
        )
    return backends


def _resolve_backends(args, payload: dict) -> list[BackendDescriptor]:
    if args.backends:
        return [_parse_backend_spec(spec, args.timeout) for spec in args.backends]
    return _config_backends(payload)


def _pipeline_config(args) -> PipelineConfig:
    payload = _load_config_file(args.config)
    backends = _resolve_backends(args, payload)
    use_heuristic = args.heuristic
    if use_heuristic is None:
        use_heuristic = payload.get("heuristic", True)
    defang = args.defang
    if defang is None:
        defang = payload.get("defang", False)
    priority = args.priority or payload.get("priority", "HTFS")
    patterns = None
    if args.patterns:
        patterns = tuple(load_patterns(Path(args.patterns).read_text(encoding="utf-8")))
    return PipelineConfig(
        use_heuristic=use_heuristic,
        backends=tuple(backends),
        priority_code=priority,
        defang=bool(defang),
        skip_unready=args.skip_unready,
        output_format=args.format,
        patterns=patterns,
    )


def _gather_documents(args, parser: _Parser) -> list[DocumentText]:
    chosen = [bool(args.text is not None), bool(args.file), bool(args.stdin)]
    if sum(chosen) != 1:
        parser.error("choose exactly one input: --text, --file, or --stdin")
    if args.text is not None:
        return [DocumentText("text", args.text)]
    if args.stdin:
        return [DocumentText("stdin", sys.stdin.read())]
    return [
        DocumentText(path, Path(path).read_text(encoding="utf-8")) for path in args.file
    ]


def _mentions_to_tagged(doc: DocumentText, mentions) -> tuple[conll.TaggedDocument, int]:
    """Convert one document's mentions into a line-per-sentence TaggedDocument.

    Mentions that do not align with whitespace token boundaries are dropped
    (returned in the skip count) instead of failing the whole document.
    """
    tokens = conll.whitespace_tokens(doc.text)
    starts = {t.start for t in tokens}
    ends = {t.end for t in tokens}
    aligned = [m for m in mentions if m.start in starts and m.end in ends]
    tags = conll.spans_to_bio(doc, aligned, tokens)

    sentences = []
    line_start = 0
    cursor = 0
    for line in doc.text.split("\n"):
        line_end = line_start + len(line)
        sent_tokens = []
        sent_tags = []
        while cursor < len(tokens) and tokens[cursor].end <= line_end:
            sent_tokens.append(tokens[cursor])
            sent_tags.append(tags[cursor])
            cursor += 1
        if sent_tokens:
            sentences.append((tuple(sent_tokens), tuple(sent_tags)))
        line_start = line_end + 1
    tagged = conll.TaggedDocument(doc.doc_id, tuple(sentences))
    return tagged, len(list(mentions)) - len(aligned)


def _cmd_extract(args, parser: _Parser) -> int:
    config = _pipeline_config(args)
    docs = _gather_documents(args, parser)

    if args.jobs > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda d: extract_pipeline(d, config), docs))
    else:
        results = [extract_pipeline(doc, config) for doc in docs]

    if config.output_format == "text":
        for i, (doc, mentions) in enumerate(zip(docs, results)):
            if len(docs) > 1:
                if i:
                    print()
                print(f"# {doc.doc_id}")
            for line in render_text(mentions):
                print(line)
    elif config.output_format == "json":
        for doc, mentions in zip(docs, results):
            print(
                json.dumps(
                    {"doc_id": doc.doc_id, "entities": [m.to_dict() for m in mentions]}
                )
            )
    else:  # conll
        tagged = []
        for doc, mentions in zip(docs, results):
            tagged_doc, skipped = _mentions_to_tagged(doc, mentions)
            if skipped:
                print(
                    f"warning: {doc.doc_id}: {skipped} mention(s) not aligned to "
                    "token boundaries were dropped",
                    file=sys.stderr,
                )
            tagged.append(tagged_doc)
        for line in conll.write_conll(tagged):
            print(line)
    return 0


def _read_tag_sequences(path: str) -> list[list[str]]:
    docs = conll.read_conll_file(path)
    return [list(tags) for doc in docs for _, tags in doc.sentences]


def _cmd_eval(args, parser: _Parser) -> int:
    gold = _read_tag_sequences(args.gold)
    pred = _read_tag_sequences(args.pred)
    report = evaluate(gold, pred)
    if args.json:
        print(json.dumps(report_to_dict(report), indent=2))
    else:
        print(render_report(report))
    return 0


_SPLIT_ALIASES = {"train": ("train",), "dev": ("dev", "valid"), "test": ("test",)}


def load_corpus(corpus_dir: str | Path) -> conll.Corpus:
    """Load train/dev/test splits from a corpus directory.

    Each split may be a subdirectory of CoNLL files or a flat
    ``<split>.txt`` / ``<split>.conll`` file (``valid.*`` counts as dev).
    """
    corpus_dir = Path(corpus_dir)
    splits: dict[str, list[conll.TaggedDocument]] = {}
    for split, aliases in _SPLIT_ALIASES.items():
        docs: list[conll.TaggedDocument] = []
        for alias in aliases:
            subdir = corpus_dir / alias
            if subdir.is_dir():
                for path in sorted(subdir.iterdir()):
                    if path.is_file():
                        docs.extend(conll.read_conll_file(path))
                break
            for suffix in (".txt", ".conll"):
                path = corpus_dir / f"{alias}{suffix}"
                if path.is_file():
                    docs.extend(conll.read_conll_file(path))
                    break
            if docs:
                break
        if docs:
            splits[split] = docs
    if not splits:
        raise conll.EmptyInput(f"no train/dev/test splits found under {corpus_dir}")
    return conll.Corpus(splits=splits)


def render_stats(report: conll.StatsReport) -> str:
    classes = report.classes()
    name_width = max(8, *(len(c) for c in classes)) + 2
    header = f"{'Split':<8}" + "".join(f"{c:>{name_width}}" for c in classes)
    header += f"{'Entities':>10}{'Tokens':>10}"
    lines = [header, "-" * len(header)]
    for split in ("train", "dev", "test"):
        if split not in report.per_split:
            continue
        stats = report.per_split[split]
        row = f"{split.capitalize():<8}" + "".join(
            f"{stats.entities.get(c, 0):>{name_width}}" for c in classes
        )
        row += f"{stats.total_entities:>10}{stats.tokens:>10}"
        lines.append(row)
    lines.append("-" * len(header))
    totals: dict[str, int] = {}
    for stats in report.per_split.values():
        for cls, n in stats.entities.items():
            totals[cls] = totals.get(cls, 0) + n
    row = f"{'Total':<8}" + "".join(f"{totals.get(c, 0):>{name_width}}" for c in classes)
    row += f"{report.total_entities:>10}{report.total_tokens:>10}"
    lines.append(row)
    return "\n".join(lines)


def _cmd_stats(args, parser: _Parser) -> int:
    corpus = load_corpus(args.corpus)
    print(render_stats(conll.corpus_stats(corpus)))
    return 0


def _cmd_backends_check(args, parser: _Parser) -> int:
    payload = _load_config_file(args.config)
    backends = _resolve_backends(args, payload)
    if not backends:
        parser.error("no backends configured; pass --backends or a config file")
    all_ready = True
    for backend in backends:
        status = health_check(backend)
        if status.ready:
            print(f"{backend.source.code} {backend.source.name} {backend.endpoint} ready")
        else:
            all_ready = False
            print(
                f"{backend.source.code} {backend.source.name} {backend.endpoint} "
                f"unready ({status.reason})"
            )
    return 0 if all_ready else 2


def _add_backend_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--backends",
        action="append",
        metavar="SPEC",
        help="backend as name=endpoint (transformer/flair/spacy) or CODE:name=endpoint; "
        "repeatable; endpoints may be http(s)://... or mock:<script.json>",
    )
    sub.add_argument("--timeout", type=float, default=10.0, help="backend timeout in seconds")
    sub.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR})")


def build_parser() -> _Parser:
    parser = _Parser(prog="ctiner", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    extract = sub.add_parser("extract", help="extract entities from text or files")
    extract.add_argument("--text", help="inline text to process")
    extract.add_argument("--file", action="append", help="input file; repeatable")
    extract.add_argument("--stdin", action="store_true", help="read the document from stdin")
    _add_backend_flags(extract)
    extract.add_argument("--priority", help="priority code, e.g. HTFS")
    extract.add_argument(
        "--heuristic",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="enable/disable the IOC heuristics (default: enabled)",
    )
    extract.add_argument(
        "--defang",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="normalize defanged indicators (hxxp, [.]) before matching",
    )
    extract.add_argument("--format", choices=OUTPUT_FORMATS, default="text")
    extract.add_argument(
        "--skip-unready",
        action="store_true",
        help="warn and continue when a backend fails instead of aborting",
    )
    extract.add_argument("--jobs", type=int, default=1, help="concurrent documents")
    extract.add_argument("--patterns", help="custom pattern table file (see README)")
    extract.set_defaults(func=_cmd_extract)

    eval_cmd = sub.add_parser("eval", help="span-level evaluation of CoNLL predictions")
    eval_cmd.add_argument("--gold", required=True, help="gold CoNLL file")
    eval_cmd.add_argument("--pred", required=True, help="predicted CoNLL file")
    eval_cmd.add_argument("--json", action="store_true", help="machine-readable output")
    eval_cmd.set_defaults(func=_cmd_eval)

    stats = sub.add_parser("stats", help="corpus statistics per split")
    stats.add_argument("--corpus", required=True, help="corpus directory (train/dev/test)")
    stats.set_defaults(func=_cmd_stats)

    backends = sub.add_parser("backends", help="backend utilities")
    backends_sub = backends.add_subparsers(dest="backends_command", required=True)
    check = backends_sub.add_parser("check", help="probe configured backends' health")
    _add_backend_flags(check)
    check.set_defaults(func=_cmd_backends_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except BackendError as exc:
        print(f"ctiner: backend error: {exc}", file=sys.stderr)
        return 2
    except _DATA_ERRORS as exc:
        print(f"ctiner: data error: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        print(f"ctiner: data error: {exc}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as exc:
        print(f"ctiner: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
