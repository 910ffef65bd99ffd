"""Span-level exact-match evaluation: micro P/R/F1 plus per-class breakdown.

A predicted span counts as a true positive iff a gold span with the same
class, start, end, and sentence exists. Precision, recall, and F1 use the
0/0 -> 0 convention so reports are total. Lenient BIO decoding is applied
to both sides, matching the default scheme of standard span evaluators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .conll import bio_to_spans
from .model import CtinerError

TagSeqs = Sequence[Sequence[str]]


class ShapeMismatch(CtinerError):
    """Gold and predicted taggings differ in sentence count or lengths."""


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class SpanCounts:
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class EvalReport:
    micro: Metrics
    per_class: dict[str, ClassMetrics]
    counts: dict[str, SpanCounts]


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def _check_shape(gold: TagSeqs, pred: TagSeqs) -> None:
    if len(gold) != len(pred):
        raise ShapeMismatch(f"{len(gold)} gold sentences vs {len(pred)} predicted")
    for i, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise ShapeMismatch(f"sentence {i}: {len(g)} gold tags vs {len(p)} predicted")


def _span_sets(tags: Sequence[str]) -> set[tuple[str, int, int]]:
    return set(bio_to_spans(range(len(tags)), tags, mode="lenient"))


def evaluate(gold: TagSeqs, pred: TagSeqs) -> EvalReport:
    """Score predicted tag sequences against gold, per sentence, exact match."""
    _check_shape(gold, pred)
    counts: dict[str, list[int]] = {}

    def bucket(cls: str) -> list[int]:
        return counts.setdefault(cls, [0, 0, 0])

    for g_tags, p_tags in zip(gold, pred):
        g_spans = _span_sets(g_tags)
        p_spans = _span_sets(p_tags)
        for cls, _, _ in g_spans & p_spans:
            bucket(cls)[0] += 1
        for cls, _, _ in p_spans - g_spans:
            bucket(cls)[1] += 1
        for cls, _, _ in g_spans - p_spans:
            bucket(cls)[2] += 1

    per_class: dict[str, ClassMetrics] = {}
    span_counts: dict[str, SpanCounts] = {}
    total_tp = total_fp = total_fn = 0
    for cls in sorted(counts):
        tp, fp, fn = counts[cls]
        precision, recall, f1 = _prf(tp, fp, fn)
        per_class[cls] = ClassMetrics(precision, recall, f1, support=tp + fn)
        span_counts[cls] = SpanCounts(tp, fp, fn)
        total_tp += tp
        total_fp += fp
        total_fn += fn

    micro = Metrics(*_prf(total_tp, total_fp, total_fn))
    return EvalReport(micro=micro, per_class=per_class, counts=span_counts)


def confusion_summary(
    gold: TagSeqs, pred: TagSeqs
) -> dict[tuple[str | None, str | None], int]:
    """Count span outcomes keyed by (gold class, predicted class).

    Spans with identical boundaries but different classes pair up as
    (gold_class, pred_class); spans without a same-boundary partner count
    against ``None`` on the missing side.
    """
    _check_shape(gold, pred)
    table: dict[tuple[str | None, str | None], int] = {}

    def add(key: tuple[str | None, str | None]) -> None:
        table[key] = table.get(key, 0) + 1

    for g_tags, p_tags in zip(gold, pred):
        g_by_span = {(s, e): cls for cls, s, e in _span_sets(g_tags)}
        p_by_span = {(s, e): cls for cls, s, e in _span_sets(p_tags)}
        for span, g_cls in g_by_span.items():
            p_cls = p_by_span.get(span)
            add((g_cls, p_cls))
        for span, p_cls in p_by_span.items():
            if span not in g_by_span:
                add((None, p_cls))
    return table


def render_report(report: EvalReport, title: str | None = None) -> str:
    """Aligned text table with percentage metrics at two decimal places."""
    lines = []
    if title:
        lines.append(title)
    header = f"{'Class':<16}{'Precision':>10}{'Recall':>10}{'F1-score':>10}{'Support':>9}"
    lines.append(header)
    lines.append("-" * len(header))
    for cls, m in report.per_class.items():
        lines.append(
            f"{cls:<16}{m.precision * 100:>10.2f}{m.recall * 100:>10.2f}"
            f"{m.f1 * 100:>10.2f}{m.support:>9}"
        )
    lines.append("-" * len(header))
    support = sum(m.support for m in report.per_class.values())
    micro = report.micro
    lines.append(
        f"{'micro avg':<16}{micro.precision * 100:>10.2f}{micro.recall * 100:>10.2f}"
        f"{micro.f1 * 100:>10.2f}{support:>9}"
    )
    return "\n".join(lines)


def report_to_dict(report: EvalReport) -> dict:
    """Machine-readable report: fractional metrics plus raw counts."""
    return {
        "micro": {
            "precision": report.micro.precision,
            "recall": report.micro.recall,
            "f1": report.micro.f1,
        },
        "per_class": {
            cls: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "tp": report.counts[cls].tp,
                "fp": report.counts[cls].fp,
                "fn": report.counts[cls].fn,
            }
            for cls, m in report.per_class.items()
        },
    }
