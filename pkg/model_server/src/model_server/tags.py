"""BIO decoding and span scoring helpers used for training-time evaluation."""
from __future__ import annotations


def decode_bio(tags: list[str]) -> list[tuple[str, int, int]]:
    """Lenient decode: an I- tag with no valid predecessor opens a new span."""
    spans: list[tuple[str, int, int]] = []
    open_class: str | None = None
    start = 0
    for i, tag in enumerate(tags):
        if tag == "O" or tag == "":
            if open_class is not None:
                spans.append((open_class, start, i))
                open_class = None
            continue
        prefix, cls = tag[0], tag[2:]
        if prefix == "B" or open_class is None or open_class != cls:
            if open_class is not None:
                spans.append((open_class, start, i))
            open_class, start = cls, i
    if open_class is not None:
        spans.append((open_class, start, len(tags)))
    return spans


def span_micro_f1(gold: list[list[str]], pred: list[list[str]]) -> float:
    """Exact-match span micro-F1 across sentences, 0/0 -> 0."""
    tp = fp = fn = 0
    for g_tags, p_tags in zip(gold, pred):
        g = set(decode_bio(g_tags))
        p = set(decode_bio(p_tags))
        tp += len(g & p)
        fp += len(p - g)
        fn += len(g - p)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


def project_spans_to_tags(
    token_offsets: list[tuple[int, int]], spans: list[tuple[str, int, int]]
) -> list[str]:
    """BIO tags over tokens from character spans: a token joins the span it
    intersects; earlier spans win when several touch the same token."""
    tags = ["O"] * len(token_offsets)
    for cls, start, end in sorted(spans, key=lambda s: (s[1], s[2])):
        first = True
        for i, (tok_start, tok_end) in enumerate(token_offsets):
            if max(tok_start, start) < min(tok_end, end) and tags[i] == "O":
                tags[i] = f"{'B' if first else 'I'}-{cls}"
                first = False
    return tags
