"""Category-quota benchmark workflow around a human annotation round trip.

Annotation sheet columns, in this order::

    word  status  missing_bigrams  target_frequency  category  accept  notes  sentence

``missing_bigrams`` holds a JSON list of ``[first, second, count]``.  The
annotator fills ``category`` with a code, ``accept`` with ``yes`` and may add
a carrier ``sentence``; rows for words the annotator invents can be appended
with blank ``missing_bigrams`` and frequency 0.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from collections import Counter
from dataclasses import dataclass, field

from .corpus import FrequencyTable
from .coverage import MissingBigramReport, Status, bigram_counts_from_list, bigram_counts_to_list, classify_word
from .errors import ConfigError, IncompleteQuotaError
from .textcore import normalize_text, word_surfaces

SHEET_COLUMNS = ("word", "status", "missing_bigrams", "target_frequency", "category", "accept", "notes", "sentence")
DEFAULT_TARGETS = {"IV": 50, "OOV": 50}
BENCHMARK_VERSION = 1


class Category(str, enum.Enum):
    ABBR = "Abbr"
    BRAND = "Brand"
    CM = "CM"
    CMPY = "Cmpy"
    GOVT = "Govt"
    PROP = "Prop"
    NAV = "Nav"
    EDU = "Edu"
    HEALTH = "Health"

    @classmethod
    def parse(cls, value) -> "Category":
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower()
        for member in cls:
            if member.value.lower() == v:
                return member
        raise ValueError(f"unknown category code {value!r}")


LANGUAGE_NAMES = {"hi": "Hindi", "ta": "Tamil"}

CATEGORY_SETS = {
    "hi": (Category.ABBR, Category.BRAND, Category.CM, Category.CMPY, Category.GOVT, Category.PROP, Category.NAV),
    "ta": (Category.ABBR, Category.BRAND, Category.CM, Category.EDU, Category.HEALTH, Category.PROP, Category.NAV),
}


def language_tag(value: str) -> str:
    v = str(value).strip().lower()
    for tag, name in LANGUAGE_NAMES.items():
        if v in (tag, name.lower()):
            return tag
    return v


def language_name(value: str) -> str:
    tag = language_tag(value)
    return LANGUAGE_NAMES.get(tag, value)


def categories_for(language: str, override=None) -> tuple:
    if override:
        return tuple(Category.parse(c) for c in override)
    tag = language_tag(language)
    if tag not in CATEGORY_SETS:
        raise ConfigError(f"no category set configured for language {language!r}")
    return CATEGORY_SETS[tag]


@dataclass
class BenchmarkEntry:
    id: str
    language: str
    category: Category
    word: str
    status: Status
    sentence: str
    missing_bigrams: Counter = field(default_factory=Counter)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "language": self.language,
            "category": self.category.value,
            "word": self.word,
            "status": self.status.value,
            "sentence": self.sentence,
            "missing_bigrams": bigram_counts_to_list(self.missing_bigrams),
        }

    @classmethod
    def from_json(cls, obj) -> "BenchmarkEntry":
        return cls(obj["id"], obj["language"], Category.parse(obj["category"]), obj["word"],
                   Status.parse(obj["status"]), obj.get("sentence", obj["word"]),
                   bigram_counts_from_list(obj.get("missing_bigrams", [])))


@dataclass
class QuotaState:
    categories: tuple
    counts: dict = field(default_factory=dict)
    targets: dict = field(default_factory=lambda: dict(DEFAULT_TARGETS))

    def __post_init__(self):
        self.categories = tuple(Category.parse(c) for c in self.categories)
        for cat in self.categories:
            self.counts.setdefault(cat, {"IV": 0, "OOV": 0})

    def count(self, category, status) -> int:
        return self.counts.get(Category.parse(category), {}).get(Status.parse(status).value, 0)

    def shortfalls(self) -> list:
        out = []
        for cat in self.categories:
            for status in ("IV", "OOV"):
                have = self.counts[cat][status]
                want = self.targets.get(status, 0)
                if have < want:
                    out.append((cat.value, status, have, want))
        return out

    @property
    def complete(self) -> bool:
        return not self.shortfalls()

    def under_quota(self, status: str = "OOV") -> list:
        return [c for c in self.categories if self.counts[c][status] < self.targets.get(status, 0)]

    def to_json(self) -> dict:
        return {
            "targets": dict(self.targets),
            "counts": {c.value: dict(self.counts[c]) for c in self.categories},
        }

    @classmethod
    def from_entries(cls, entries, categories, targets=None) -> "QuotaState":
        state = cls(tuple(categories), targets=dict(targets or DEFAULT_TARGETS))
        for e in entries:
            state.counts.setdefault(e.category, {"IV": 0, "OOV": 0})
            state.counts[e.category][e.status.value] += 1
        return state


def parse_targets(value) -> dict:
    """``"50"`` -> 50 IV + 50 OOV; ``"40,60"`` -> 40 IV + 60 OOV."""
    if isinstance(value, dict):
        return {"IV": int(value["IV"]), "OOV": int(value["OOV"])}
    parts = [p.strip() for p in str(value).split(",")]
    try:
        if len(parts) == 1:
            n = int(parts[0])
            return {"IV": n, "OOV": n}
        if len(parts) == 2:
            return {"IV": int(parts[0]), "OOV": int(parts[1])}
    except ValueError:
        pass
    raise ConfigError(f"bad targets {value!r}; expected N or IV,OOV")


def export_annotation_sheet(candidates, out=None) -> str:
    """Write one sheet row per candidate, in the given order.

    Returns the TSV text; also writes it to ``out`` (path or stream) if given.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(SHEET_COLUMNS)
    for cand in candidates:
        writer.writerow([
            cand.surface,
            cand.status.value,
            json.dumps(bigram_counts_to_list(cand.missing_bigrams), ensure_ascii=False),
            cand.target_frequency,
            "", "", "", "",
        ])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", encoding="utf-8", newline="") as f:
                f.write(text)
    return text


@dataclass(frozen=True)
class Reject:
    row: int
    word: str
    reason: str


@dataclass(frozen=True)
class SheetRow:
    row: int
    word: str
    status: Status
    missing_bigrams: Counter
    target_frequency: int
    category: str
    accept: str
    notes: str
    sentence: str


_YES = {"yes", "y", "1", "true", "x"}
_NO = {"", "no", "n", "0", "false"}


def read_annotation_sheet(text: str):
    """Parse sheet text into (rows, rejects); header is row 1."""
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    rows, rejects = [], []
    header = next(reader, None)
    if header is None:
        return rows, rejects
    if tuple(h.strip() for h in header) not in (SHEET_COLUMNS, SHEET_COLUMNS[:7]):
        raise ConfigError(f"sheet header must be {', '.join(SHEET_COLUMNS)}")
    for rownum, cells in enumerate(reader, 2):
        if not any(c.strip() for c in cells):
            continue
        word = cells[0].strip() if cells else ""
        if len(cells) not in (7, 8):
            rejects.append(Reject(rownum, word, f"malformed row: expected 7 or 8 columns, got {len(cells)}"))
            continue
        cells = cells + [""] * (8 - len(cells))
        try:
            status = Status.parse(cells[1])
            missing = bigram_counts_from_list(json.loads(cells[2])) if cells[2].strip() else Counter()
            freq = int(cells[3]) if cells[3].strip() else 0
        except (ValueError, TypeError, KeyError):
            rejects.append(Reject(rownum, word, "malformed row: bad status, missing_bigrams or target_frequency"))
            continue
        rows.append(SheetRow(rownum, word, status, missing, freq, cells[4].strip(), cells[5].strip(),
                             cells[6], cells[7].strip()))
    return rows, rejects


def import_annotations(sheet: str, training: FrequencyTable, language: str = "hi",
                       categories=None, targets=None):
    """Turn accepted sheet rows into benchmark entries.

    ``sheet`` is the TSV text.  Every accepted row is re-verified against
    ``training``; a row whose claimed status disagrees is rejected.
    Returns ``(entries, quota, rejects)``.
    """
    lang = language_tag(language)
    cats = categories_for(lang, categories)
    rows, rejects = read_annotation_sheet(sheet)
    entries = []
    seen = {}
    for r in rows:
        accept = r.accept.lower()
        if accept in _NO:
            continue
        if accept not in _YES:
            rejects.append(Reject(r.row, r.word, f"unrecognised accept value {r.accept!r}"))
            continue
        try:
            cat = Category.parse(r.category)
        except ValueError:
            rejects.append(Reject(r.row, r.word, f"unknown category code {r.category!r}"))
            continue
        if cat not in cats:
            rejects.append(Reject(r.row, r.word, f"category {cat.value} not used for {lang}"))
            continue
        words = word_surfaces(normalize_text(r.word))
        if len(words) != 1:
            rejects.append(Reject(r.row, r.word, "word cell must hold exactly one word"))
            continue
        word = words[0]
        if word in seen:
            rejects.append(Reject(r.row, word, f"duplicate of row {seen[word]}"))
            continue
        verdict = classify_word(word, training)
        if verdict.status is not r.status:
            rejects.append(Reject(r.row, word, f"status mismatch: claimed {r.status.value}, training says {verdict.status.value}"))
            continue
        seen[word] = r.row
        sentence = normalize_text(r.sentence) if r.sentence else word
        entries.append(BenchmarkEntry(f"{lang}-{r.row:05d}", lang, cat, word, verdict.status, sentence,
                                      verdict.missing_bigrams))
    quota = QuotaState.from_entries(entries, cats, targets)
    return entries, quota, rejects


def gap_report(quota: QuotaState, entries, report: MissingBigramReport) -> list:
    """Report bigrams still absent from each OOV-short category, most frequent first."""
    out = []
    for cat in quota.under_quota("OOV"):
        used = set()
        for e in entries:
            if e.category is cat and e.status is Status.OOV:
                used.update(e.missing_bigrams)
        out.append((cat, [b for b in report.bigrams if b not in used]))
    return out


def gap_report_tsv(gaps, report: MissingBigramReport) -> str:
    freq = report.frequencies()
    rows = ["category\tfirst\tsecond\ttarget_count"]
    for cat, bigrams in gaps:
        rows.extend(f"{cat.value}\t{b.first}\t{b.second}\t{freq.get(b, 0)}" for b in bigrams)
    return "\n".join(rows) + "\n"


def _entry_sort_key(order):
    return lambda e: (order.get(e.category, len(order)), e.status.value != "IV", e.word)


def build_benchmark(entries, quota: QuotaState, force: bool = False, meta=None) -> str:
    """Canonical benchmark JSON; raises :class:`IncompleteQuotaError` unless complete or forced."""
    shortfalls = quota.shortfalls()
    if shortfalls and not force:
        raise IncompleteQuotaError(shortfalls)
    ids = Counter(e.id for e in entries)
    dup = sorted(i for i, n in ids.items() if n > 1)
    if dup:
        raise ConfigError("duplicate entry ids: " + ", ".join(dup))
    order = {c: i for i, c in enumerate(quota.categories)}
    ordered = sorted(entries, key=_entry_sort_key(order))
    languages = sorted({e.language for e in entries})
    per_cat = {c.value: {"IV": 0, "OOV": 0, "total": 0} for c in quota.categories}
    for e in ordered:
        slot = per_cat.setdefault(e.category.value, {"IV": 0, "OOV": 0, "total": 0})
        slot[e.status.value] += 1
        slot["total"] += 1
    doc = {
        "header": {
            "version": BENCHMARK_VERSION,
            "languages": languages,
            "categories": [c.value for c in quota.categories],
            "targets": dict(quota.targets),
            "counts": per_cat,
            "complete": not shortfalls,
            "n_entries": len(ordered),
        },
        "entries": [e.to_json() for e in ordered],
    }
    if meta:
        doc["header"]["meta"] = meta
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def parse_benchmark(text: str):
    """Inverse of :func:`build_benchmark`: returns (entries, quota)."""
    doc = json.loads(text)
    head = doc["header"]
    entries = [BenchmarkEntry.from_json(e) for e in doc["entries"]]
    quota = QuotaState.from_entries(entries, head["categories"], head.get("targets"))
    return entries, quota


def benchmark_words(text: str, status: str | None = None) -> set:
    entries, _ = parse_benchmark(text)
    return {e.word for e in entries if status is None or e.status.value == status}


def entries_to_json(entries, quota: QuotaState, rejects=(), meta=None) -> str:
    doc = {
        "entries": [e.to_json() for e in entries],
        "categories": [c.value for c in quota.categories],
        "quota": quota.to_json(),
        "rejects": [{"row": r.row, "word": r.word, "reason": r.reason} for r in rejects],
    }
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def entries_from_json(text: str):
    doc = json.loads(text)
    entries = [BenchmarkEntry.from_json(e) for e in doc["entries"]]
    quota = QuotaState.from_entries(entries, doc["categories"], doc["quota"]["targets"])
    return entries, quota
