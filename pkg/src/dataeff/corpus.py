"""Corpus ingestion and per-domain bookkeeping.

Corpora arrive as TSV (header ``domain<TAB>utterance<TAB>semantic_parse`` with
an optional ``split`` column) or JSONL (one object per line, same keys).
Frames are parsed eagerly so corruption surfaces at load time with a line
number, and row order is preserved because sampling determinism depends on it.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusError, FrameParseError, UnknownDomainError
from .frames import Frame, parse_frame, root_intent, serialize_frame

SPLITS = ("train", "eval", "test")


@dataclass(frozen=True)
class CorpusRow:
    domain: str
    utterance: str
    frame: Frame
    split: str = "train"


class CorpusTable:
    """Immutable, order-preserving view of corpus rows indexed by domain and split."""

    def __init__(self, rows: list[CorpusRow]):
        self.rows: tuple[CorpusRow, ...] = tuple(rows)
        index: dict[str, dict[str, list[int]]] = {}
        for pos, row in enumerate(self.rows):
            per_split = index.setdefault(row.domain, {s: [] for s in SPLITS})
            per_split[row.split].append(pos)
        self._index = {
            domain: {split: tuple(ids) for split, ids in per_split.items()}
            for domain, per_split in index.items()
        }

    def __len__(self) -> int:
        return len(self.rows)

    def domains(self) -> tuple[str, ...]:
        return tuple(self._index)

    def has_domain(self, domain: str) -> bool:
        return domain in self._index

    def row_ids(self, domain: str, split: str) -> tuple[int, ...]:
        """Positions of a domain's rows in one split, in file order."""
        if domain not in self._index:
            raise UnknownDomainError(
                f"domain {domain!r} not in corpus (have: {', '.join(sorted(self._index))})"
            )
        if split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {split!r}")
        return self._index[domain][split]


@dataclass(frozen=True)
class DomainStats:
    domain: str
    split_counts: dict  # split -> row count
    intent_histogram: Counter  # root intent label -> count over the train split


def _default_split(path: Path) -> str:
    stem = path.stem
    for split in SPLITS:
        if stem.endswith("_" + split):
            return split
    return "train"


def _check_split(value: str, line: int) -> str:
    if value not in SPLITS:
        raise CorpusError(f"unknown split {value!r} (expected one of {SPLITS})", line)
    return value


def _parse_row_frame(text: str, line: int) -> Frame:
    try:
        return parse_frame(text)
    except FrameParseError as exc:
        raise CorpusError(f"bad frame: {exc}", line) from exc


def load_corpus(path: str | Path, format: str | None = None) -> CorpusTable:
    """Load a TSV or JSONL corpus into a CorpusTable.

    format defaults from the extension (.tsv vs .jsonl/.json). Rows without a
    split column take the split implied by a ``_train``/``_eval``/``_test``
    filename suffix, else ``train``.
    """
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix.lower() in (".jsonl", ".json") else "tsv"
    if format not in ("tsv", "jsonl"):
        raise ValueError(f"format must be 'tsv' or 'jsonl', got {format!r}")
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc

    fallback_split = _default_split(path)
    rows: list[CorpusRow] = []
    if format == "tsv":
        if not lines:
            raise CorpusError("TSV corpus has no header row", 1)
        header = lines[0].rstrip("\n").split("\t")
        expected = ["domain", "utterance", "semantic_parse"]
        if header[:3] != expected or header not in (expected, expected + ["split"]):
            raise CorpusError(
                f"TSV header must be {expected} (optional trailing 'split'), got {header}", 1
            )
        has_split = len(header) == 4
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != len(header):
                raise CorpusError(
                    f"expected {len(header)} tab-separated fields, got {len(fields)}", lineno
                )
            domain, utterance, parse_text = fields[0], fields[1], fields[2]
            if not domain:
                raise CorpusError("empty domain", lineno)
            split = _check_split(fields[3], lineno) if has_split else fallback_split
            frame = _parse_row_frame(parse_text, lineno)
            rows.append(CorpusRow(domain, utterance, frame, split))
    else:
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"bad JSON: {exc}", lineno) from exc
            missing = [k for k in ("domain", "utterance", "semantic_parse") if k not in obj]
            if missing:
                raise CorpusError(f"missing keys: {', '.join(missing)}", lineno)
            if not obj["domain"]:
                raise CorpusError("empty domain", lineno)
            split = _check_split(obj["split"], lineno) if "split" in obj else fallback_split
            frame = _parse_row_frame(obj["semantic_parse"], lineno)
            rows.append(CorpusRow(obj["domain"], obj["utterance"], frame, split))
    return CorpusTable(rows)


def save_corpus(table: CorpusTable, path: str | Path) -> None:
    """Write a table back out as TSV with an explicit split column."""
    path = Path(path)
    lines = ["domain\tutterance\tsemantic_parse\tsplit"]
    for row in table.rows:
        lines.append(
            "\t".join([row.domain, row.utterance, serialize_frame(row.frame), row.split])
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def domain_stats(table: CorpusTable, domain: str) -> DomainStats:
    """Split counts plus the root-intent histogram over the domain's train split."""
    if not table.has_domain(domain):
        raise UnknownDomainError(f"domain {domain!r} not in corpus")
    counts = {split: len(table.row_ids(domain, split)) for split in SPLITS}
    histogram: Counter = Counter()
    for pos in table.row_ids(domain, "train"):
        histogram[root_intent(table.rows[pos].frame)] += 1
    return DomainStats(domain, counts, histogram)


def partition(table: CorpusTable, target_domain: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split row positions into (source, target): everything else vs the target domain.

    The two id lists are disjoint and together cover the whole table.
    """
    if not table.has_domain(target_domain):
        raise UnknownDomainError(f"target domain {target_domain!r} not in corpus")
    if len(table.domains()) < 2:
        raise UnknownDomainError(
            f"corpus only contains {target_domain!r}; need at least one source domain"
        )
    source = tuple(
        pos for pos, row in enumerate(table.rows) if row.domain != target_domain
    )
    target = tuple(
        pos for pos, row in enumerate(table.rows) if row.domain == target_domain
    )
    return source, target
