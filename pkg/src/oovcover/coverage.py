"""IV/OOV classification against a training table and missing-bigram ranking."""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .corpus import FrequencyTable, check_same_mode
from .errors import ConfigError
from .textcore import Bigram, SegmentationMode, WordToken, classify_script, extract_bigrams, has_digit, segment_units

DEFAULT_MIN_FREQUENCY = 10
MAX_EXAMPLES = 5


class Status(str, enum.Enum):
    IV = "IV"
    OOV = "OOV"

    @classmethod
    def parse(cls, value) -> "Status":
        if isinstance(value, cls):
            return value
        v = str(value).strip().upper()
        return cls({"I": "IV", "O": "OOV"}.get(v, v))


@dataclass
class CoverageVerdict:
    word: WordToken
    status: Status
    missing_bigrams: Counter = field(default_factory=Counter)
    target_frequency: int = 0

    @property
    def surface(self) -> str:
        return self.word.surface

    def to_json(self) -> dict:
        return {
            "word": self.word.surface,
            "script": self.word.script_class.value,
            "status": self.status.value,
            "missing_bigrams": bigram_counts_to_list(self.missing_bigrams),
            "target_frequency": self.target_frequency,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CoverageVerdict":
        surface = obj["word"]
        return cls(
            word=WordToken(surface, classify_script(surface)),
            status=Status.parse(obj["status"]),
            missing_bigrams=bigram_counts_from_list(obj.get("missing_bigrams", [])),
            target_frequency=int(obj.get("target_frequency", 0)),
        )


@dataclass(frozen=True)
class ReportEntry:
    bigram: Bigram
    target_count: int
    example_words: tuple = ()


@dataclass
class MissingBigramReport:
    entries: list
    mode: SegmentationMode = SegmentationMode.CODEPOINT
    min_frequency: int = DEFAULT_MIN_FREQUENCY

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def bigrams(self) -> list:
        return [e.bigram for e in self.entries]

    def frequencies(self) -> dict:
        return {e.bigram: e.target_count for e in self.entries}

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "min_frequency": self.min_frequency,
            "entries": [
                {"first": e.bigram.first, "second": e.bigram.second,
                 "target_count": e.target_count, "examples": list(e.example_words)}
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MissingBigramReport":
        entries = [ReportEntry(Bigram(e["first"], e["second"]), int(e["target_count"]), tuple(e.get("examples", ())))
                   for e in obj["entries"]]
        return cls(entries, SegmentationMode.parse(obj.get("mode", "codepoint")),
                   int(obj.get("min_frequency", DEFAULT_MIN_FREQUENCY)))

    def to_tsv(self) -> str:
        rows = ["first\tsecond\ttarget_count\texamples"]
        for e in self.entries:
            rows.append(f"{e.bigram.first}\t{e.bigram.second}\t{e.target_count}\t{' '.join(e.example_words)}")
        return "\n".join(rows) + "\n"


def bigram_counts_to_list(counts) -> list:
    return [[b[0], b[1], n] for b, n in sorted(counts.items())]


def bigram_counts_from_list(items) -> Counter:
    return Counter({Bigram(a, b): int(n) for a, b, n in items})


def _as_token(word) -> WordToken:
    if isinstance(word, WordToken):
        return word
    return WordToken(word, classify_script(word))


def classify_word(word, training: FrequencyTable, target_frequency: int = 0) -> CoverageVerdict:
    token = _as_token(word)
    missing = Counter({b: n for b, n in extract_bigrams(token, training.mode).items()
                       if training.bigram_counts.get(b, 0) == 0})
    status = Status.OOV if missing else Status.IV
    return CoverageVerdict(token, status, missing, target_frequency)


def missing_bigram_report(training: FrequencyTable, target: FrequencyTable,
                          min_frequency: int = DEFAULT_MIN_FREQUENCY) -> MissingBigramReport:
    """All target bigrams with count >= ``min_frequency`` never seen in training.

    Ranked by target count (descending), then bigram.  Each entry lists up to
    five example words, the most frequent target words containing it.
    """
    check_same_mode(training, target)
    if min_frequency < 1:
        raise ConfigError("min_frequency must be >= 1")
    kept = {b: n for b, n in target.bigram_counts.items()
            if n >= min_frequency and training.bigram_counts.get(b, 0) == 0}
    examples: dict = {b: [] for b in kept}
    if kept:
        for word, freq in target.word_counts.items():
            for b in extract_bigrams(word, target.mode):
                if b in examples:
                    examples[b].append((-freq, word))
    entries = []
    for b in sorted(kept, key=lambda b: (-kept[b], b)):
        top = sorted(examples[b])[:MAX_EXAMPLES]
        entries.append(ReportEntry(b, kept[b], tuple(w for _, w in top)))
    return MissingBigramReport(entries, target.mode, min_frequency)


def find_oov_candidates(training: FrequencyTable, target: FrequencyTable,
                        report: MissingBigramReport) -> list[CoverageVerdict]:
    """Target words containing at least one report bigram, digits excluded.

    Sorted by number of distinct report bigrams, then target frequency
    (both descending), then word.
    """
    check_same_mode(training, target)
    wanted = set(report.bigrams)
    if not wanted:
        return []
    scored = []
    for word, freq in target.word_counts.items():
        if has_digit(word):
            continue
        bigrams = extract_bigrams(word, target.mode)
        hits = sum(1 for b in bigrams if b in wanted)
        if hits:
            scored.append((-hits, -freq, word))
    scored.sort()
    return [classify_word(word, training, -negfreq) for _, negfreq, word in scored]


def report_bigram_hits(verdict: CoverageVerdict, report: MissingBigramReport) -> int:
    wanted = set(report.bigrams)
    return sum(1 for b in verdict.missing_bigrams if b in wanted)


def load_vowel_set(spec: str = "hi") -> frozenset:
    """Vowel inventory by language tag (``hi``, ``ta``, ``en``; join with ``+``)
    or a path to a JSON file shaped like the shipped ``vowels.json``."""
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        data = json.loads(path.read_text(encoding="utf-8"))
        keys = list(data)
    else:
        data = json.loads(resources.files("oovcover").joinpath("data/vowels.json").read_text(encoding="utf-8"))
        keys = [k.strip().lower() for k in spec.split("+")]
    vowels = set()
    for key in keys:
        if key not in data:
            raise ConfigError(f"no vowel inventory for {key!r}")
        entry = data[key]
        if isinstance(entry, dict):
            for chars in entry.values():
                vowels.update(chars)
        else:
            vowels.update(entry)
    return frozenset(vowels)


def _is_vowel_unit(unit: str, vowel_set) -> bool:
    # a grapheme cluster counts by its base character
    return unit in vowel_set or unit[:1] in vowel_set


def count_consecutive_vowel_words(table: FrequencyTable, vowel_set: Iterable[str]) -> tuple[int, int]:
    """(word types with an adjacent vowel-vowel unit pair, total such pairs over types)."""
    vowel_set = frozenset(vowel_set)
    if not vowel_set:
        raise ConfigError("vowel_set must be non-empty")
    types = 0
    occurrences = 0
    for word in table.word_counts:
        flags = [_is_vowel_unit(u, vowel_set) for u in segment_units(word, table.mode)]
        pairs = sum(1 for a, b in zip(flags, flags[1:]) if a and b)
        if pairs:
            types += 1
            occurrences += pairs
    return types, occurrences
