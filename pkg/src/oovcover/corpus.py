"""Word and bigram frequency tables built from plain-text corpora.

Ingestion counts raw whitespace tokens per line first and only then
tokenizes each distinct token once; bigram counts are derived from the
word counts (every word occurrence contributes its bigrams).  The result
is identical to running :func:`textcore.tokenize_words` on every
normalized line, just much faster on large corpora.
"""

from __future__ import annotations

import io
import logging
import unicodedata
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from .errors import LineTooLongError, ModeMismatchError, TableFormatError, TextDecodeError
from .textcore import SegmentationMode, Bigram, extract_bigrams, split_raw, strip_edges

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAX_LINE_BYTES = 1 << 20

Lines = Iterable[Union[bytes, str]]


@dataclass
class FrequencyTable:
    mode: SegmentationMode = SegmentationMode.CODEPOINT
    word_counts: Counter = field(default_factory=Counter)
    bigram_counts: Counter = field(default_factory=Counter)
    source_manifest: list = field(default_factory=list)
    total_word_tokens: int = 0

    def __post_init__(self):
        self.mode = SegmentationMode.parse(self.mode)

    def __len__(self):
        return len(self.word_counts)

    def bigram_count(self, bigram) -> int:
        return self.bigram_counts.get(bigram, 0)

    def is_empty(self) -> bool:
        return not self.word_counts


@dataclass(frozen=True)
class StatsSummary:
    distinct_words: int
    total_word_tokens: int
    distinct_bigrams: int
    total_bigram_occurrences: int

    def as_dict(self):
        return {
            "distinct_words": self.distinct_words,
            "total_word_tokens": self.total_word_tokens,
            "distinct_bigrams": self.distinct_bigrams,
            "total_bigram_occurrences": self.total_bigram_occurrences,
        }


def check_same_mode(a: FrequencyTable, b: FrequencyTable) -> None:
    if a.mode is not b.mode:
        raise ModeMismatchError(a.mode.value, b.mode.value)


def _words_of(raw_token: str) -> list[str]:
    out = []
    for piece in split_raw(raw_token):
        surface = strip_edges(piece)
        if surface:
            out.append(surface)
    return out


def _count_raw_tokens(source_id: str, lines: Lines, dedupe: bool, seen: set | None):
    raw_counts: Counter = Counter()
    n_lines = 0
    for n_lines, line in enumerate(lines, 1):
        if isinstance(line, (bytes, bytearray)):
            if len(line) > MAX_LINE_BYTES:
                raise LineTooLongError(source_id, n_lines, len(line))
            try:
                line = line.decode("utf-8-sig" if n_lines == 1 else "utf-8")
            except UnicodeDecodeError as exc:
                raise TextDecodeError(exc.start, exc.reason, source=source_id, line=n_lines) from None
        elif len(line) > MAX_LINE_BYTES and len(line.encode("utf-8")) > MAX_LINE_BYTES:
            raise LineTooLongError(source_id, n_lines, len(line.encode("utf-8")))
        if line.isascii():
            text = line
        else:
            text = unicodedata.normalize("NFC", line)
        if dedupe:
            key = " ".join(text.split())
            if key in seen:
                continue
            seen.add(key)
        raw_counts.update(text.split())
    return raw_counts, n_lines


def table_from_word_counts(word_counts: Counter, mode: SegmentationMode, manifest=()) -> FrequencyTable:
    mode = SegmentationMode.parse(mode)
    bigrams: Counter = Counter()
    for word, count in word_counts.items():
        for bg, n in extract_bigrams(word, mode).items():
            bigrams[bg] += n * count
    return FrequencyTable(
        mode=mode,
        word_counts=Counter({w: c for w, c in word_counts.items() if c > 0}),
        bigram_counts=bigrams,
        source_manifest=_coalesce_manifest(manifest),
        total_word_tokens=sum(word_counts.values()),
    )


def ingest_lines(source_id: str, lines: Lines, mode=SegmentationMode.CODEPOINT, dedupe=False) -> FrequencyTable:
    """Build a table from one stream of lines (bytes or str)."""
    return ingest_corpus([(source_id, lines)], mode, dedupe=dedupe)


def ingest_corpus(sources, mode=SegmentationMode.CODEPOINT, dedupe: bool = False) -> FrequencyTable:
    """Count every word token and bigram occurrence over all sources.

    ``sources`` is a list of ``(source_id, lines)`` pairs, or of bare line
    iterables which are then named ``stream-0``, ``stream-1``, ...  Lines
    may be ``bytes`` (decoded strictly as UTF-8) or ``str``.

    With ``dedupe`` set, repeated normalized lines are counted once across
    all sources of this call.
    """
    mode = SegmentationMode.parse(mode)
    raw_counts: Counter = Counter()
    manifest = []
    seen: set | None = set() if dedupe else None
    for i, src in enumerate(sources):
        if isinstance(src, tuple) and len(src) == 2 and isinstance(src[0], str):
            source_id, lines = src
        else:
            source_id, lines = f"stream-{i}", src
        if isinstance(lines, (str, bytes)):
            lines = io.StringIO(lines) if isinstance(lines, str) else io.BytesIO(lines)
        counts, n_lines = _count_raw_tokens(source_id, lines, dedupe, seen)
        raw_counts.update(counts)
        manifest.append((source_id, n_lines))

    word_counts: Counter = Counter()
    for raw, count in raw_counts.items():
        for word in _words_of(raw):
            word_counts[word] += count
    table = table_from_word_counts(word_counts, mode, manifest)
    if table.is_empty():
        log.warning("ingested zero words from %d source(s); table is empty", len(manifest))
    return table


def _ingest_path(args):
    path, source_id, mode, dedupe = args
    with open(path, "rb") as f:
        return ingest_corpus([(source_id, f)], mode, dedupe=dedupe)


def ingest_files(paths, mode=SegmentationMode.CODEPOINT, dedupe=False, workers: int = 1, source_ids=None) -> FrequencyTable:
    """Ingest text files, optionally fanning out one process per file.

    Dedupe across files only applies with ``workers == 1``; worker tables
    deduplicate within their own file.
    """
    paths = [Path(p) for p in paths]
    ids = list(source_ids) if source_ids is not None else [str(p) for p in paths]
    mode = SegmentationMode.parse(mode)
    if workers <= 1 or len(paths) <= 1:
        handles = [open(p, "rb") for p in paths]
        try:
            return ingest_corpus(list(zip(ids, handles)), mode, dedupe=dedupe)
        finally:
            for h in handles:
                h.close()
    table = empty_table(mode)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_ingest_path, [(p, i, mode, dedupe) for p, i in zip(paths, ids)]):
            table = merge_tables(table, part)
    return table


def empty_table(mode=SegmentationMode.CODEPOINT) -> FrequencyTable:
    return FrequencyTable(mode=SegmentationMode.parse(mode))


def _coalesce_manifest(entries) -> list:
    # shards of one source share its id; their line counts add up
    merged: dict = {}
    for source_id, n_lines in entries:
        merged[source_id] = merged.get(source_id, 0) + int(n_lines)
    return sorted(merged.items())


def merge_tables(a: FrequencyTable, b: FrequencyTable) -> FrequencyTable:
    check_same_mode(a, b)
    return FrequencyTable(
        mode=a.mode,
        word_counts=a.word_counts + b.word_counts,
        bigram_counts=a.bigram_counts + b.bigram_counts,
        source_manifest=_coalesce_manifest(list(a.source_manifest) + list(b.source_manifest)),
        total_word_tokens=a.total_word_tokens + b.total_word_tokens,
    )


def corpus_stats(table: FrequencyTable) -> StatsSummary:
    return StatsSummary(
        distinct_words=len(table.word_counts),
        total_word_tokens=table.total_word_tokens,
        distinct_bigrams=len(table.bigram_counts),
        total_bigram_occurrences=sum(table.bigram_counts.values()),
    )


# --- persistence -----------------------------------------------------------
#
#   #oovcover-table<TAB>1
#   #mode<TAB>codepoint
#   #total_word_tokens<TAB>N
#   #source<TAB>id<TAB>lines          (zero or more)
#   #meta<TAB>{json}                  (optional, opaque)
#   %words
#   word<TAB>count
#   %bigrams
#   first<TAB>second<TAB>count


def dumps_table(table: FrequencyTable, meta: str | None = None) -> str:
    out = [f"#oovcover-table\t{FORMAT_VERSION}", f"#mode\t{table.mode.value}", f"#total_word_tokens\t{table.total_word_tokens}"]
    for source_id, n_lines in sorted(table.source_manifest):
        if any(c in source_id for c in "\t\n\r"):
            raise TableFormatError(f"source id contains tab or newline: {source_id!r}")
        out.append(f"#source\t{source_id}\t{n_lines}")
    if meta is not None:
        if "\n" in meta:
            raise TableFormatError("meta must be a single line")
        out.append(f"#meta\t{meta}")
    out.append("%words")
    out.extend(f"{w}\t{c}" for w, c in sorted(table.word_counts.items()) if c > 0)
    out.append("%bigrams")
    out.extend(f"{b[0]}\t{b[1]}\t{c}" for b, c in sorted(table.bigram_counts.items()) if c > 0)
    return "\n".join(out) + "\n"


def save_table(table: FrequencyTable, path, meta: str | None = None) -> None:
    data = dumps_table(table, meta).encode("utf-8")
    with open(path, "wb") as f:
        f.write(data)


def loads_table(text: str) -> FrequencyTable:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith("#oovcover-table\t"):
        raise TableFormatError("not a frequency table (missing version header)")
    version = lines[0].split("\t", 1)[1]
    if version != str(FORMAT_VERSION):
        raise TableFormatError(f"unsupported table version {version}")
    mode = None
    total = None
    manifest = []
    words: Counter = Counter()
    bigrams: Counter = Counter()
    section = None
    for lineno, line in enumerate(lines[1:], 2):
        if section is None and line.startswith("#"):
            key, _, value = line.partition("\t")
            if key == "#mode":
                mode = SegmentationMode.parse(value)
            elif key == "#total_word_tokens":
                total = int(value)
            elif key == "#source":
                sid, _, n = value.rpartition("\t")
                manifest.append((sid, int(n)))
            continue
        if line == "%words":
            section = "words"
            continue
        if line == "%bigrams":
            section = "bigrams"
            continue
        parts = line.split("\t")
        try:
            if section == "words" and len(parts) == 2:
                words[parts[0]] = int(parts[1])
            elif section == "bigrams" and len(parts) == 3:
                bigrams[Bigram(parts[0], parts[1])] = int(parts[2])
            else:
                raise ValueError
        except ValueError:
            raise TableFormatError(f"line {lineno}: malformed row {line!r}") from None
    if mode is None:
        raise TableFormatError("missing #mode header")
    if total is None:
        total = sum(words.values())
    return FrequencyTable(mode=mode, word_counts=words, bigram_counts=bigrams,
                          source_manifest=sorted(manifest), total_word_tokens=total)


def load_table(path) -> FrequencyTable:
    with open(path, "rb") as f:
        raw = f.read()
    try:
        return loads_table(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise TextDecodeError(exc.start, exc.reason, source=str(path)) from None


def list_corpus_files(inputs) -> list[Path]:
    """Expand directories to their ``*.txt`` files, sorted by path."""
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(sorted(q for q in p.rglob("*.txt") if q.is_file()))
        else:
            files.append(p)
    return files


