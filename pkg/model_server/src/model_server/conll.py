"""Minimal CoNLL reader for the documented corpus file format.

Format: ``<token>\\t<tag>`` lines (any whitespace run separates the two
columns on read), blank line after each sentence, ``-DOCSTART-`` lines
between documents. Document text is reconstructed by joining tokens with
single spaces and sentences with newlines.
"""
from __future__ import annotations

from pathlib import Path

Sentence = tuple[list[str], list[str]]  # (tokens, tags)
Document = list[Sentence]


def read_conll_file(path: str | Path) -> list[Document]:
    docs: list[Document] = []
    sentences: Document = []
    tokens: list[str] = []
    tags: list[str] = []

    def end_sentence() -> None:
        if tokens:
            sentences.append((list(tokens), list(tags)))
            tokens.clear()
            tags.clear()

    def end_document() -> None:
        end_sentence()
        if sentences:
            docs.append(list(sentences))
            sentences.clear()

    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            end_sentence()
            continue
        columns = line.split()
        if columns[0] == "-DOCSTART-":
            end_document()
            continue
        if len(columns) != 2:
            raise ValueError(f"{path}:{lineno}: expected 2 columns: {raw!r}")
        tokens.append(columns[0])
        tags.append(columns[1])
    end_document()
    return docs


def reconstruct_text(doc: Document) -> str:
    """The text whose character offsets the corpus tokens map to."""
    return "\n".join(" ".join(tokens) for tokens, _ in doc)


_SPLIT_ALIASES = {"train": ("train",), "dev": ("dev", "valid"), "test": ("test",)}


def load_dataset(dataset_dir: str | Path) -> dict[str, list[Document]]:
    """Load train/dev/test splits: per-split subdirectories or flat files."""
    dataset_dir = Path(dataset_dir)
    splits: dict[str, list[Document]] = {}
    for split, aliases in _SPLIT_ALIASES.items():
        docs: list[Document] = []
        for alias in aliases:
            subdir = dataset_dir / alias
            if subdir.is_dir():
                for path in sorted(subdir.iterdir()):
                    if path.is_file():
                        docs.extend(read_conll_file(path))
                break
            for suffix in (".txt", ".conll"):
                path = dataset_dir / f"{alias}{suffix}"
                if path.is_file():
                    docs.extend(read_conll_file(path))
                    break
            if docs:
                break
        if docs:
            splits[split] = docs
    return splits


def write_conll_file(path: str | Path, docs: list[Document]) -> None:
    lines: list[str] = []
    for index, doc in enumerate(docs):
        if index:
            lines.append("-DOCSTART-\tO")
            lines.append("")
        for tokens, tags in doc:
            lines.extend(f"{token}\t{tag}" for token, tag in zip(tokens, tags))
            lines.append("")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
