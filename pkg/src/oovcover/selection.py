"""Capped greedy maximum coverage over missing bigrams.

Each pick credits a report bigram with ``min(occurrences in word, k - credited)``
so no bigram is ever credited more than ``k`` times; once it reaches ``k``
it stops contributing to any word's gain.  The objective is monotone
submodular, so gains only shrink as the selection grows and a lazy
priority queue finds the same argmax as a full rescan.
"""

from __future__ import annotations

import enum
import heapq
from collections import Counter
from dataclasses import dataclass, field, asdict

from .errors import ConfigError

DEFAULT_K = 6
DEFAULT_BUDGET = 2000


class TieBreak(str, enum.Enum):
    LEXICOGRAPHIC = "lexicographic"
    BY_FREQUENCY_THEN_LEX = "frequency"

    @classmethod
    def parse(cls, value) -> "TieBreak":
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower()
        return cls({"lex": "lexicographic", "byfrequencythenlex": "frequency", "freq": "frequency"}.get(v, v))


@dataclass(frozen=True)
class SelectionConfig:
    k: int = DEFAULT_K
    budget: int = DEFAULT_BUDGET
    tie_break: TieBreak = TieBreak.LEXICOGRAPHIC

    def __post_init__(self):
        object.__setattr__(self, "tie_break", TieBreak.parse(self.tie_break))
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if self.k < 0:
            raise ConfigError("k must be >= 0")

    def as_dict(self):
        d = asdict(self)
        d["tie_break"] = self.tie_break.value
        return d


@dataclass(frozen=True)
class ChosenWord:
    word: str
    marginal_gain: int
    step_index: int


@dataclass
class SelectionResult:
    chosen: list = field(default_factory=list)
    credited: Counter = field(default_factory=Counter)
    raw_selected_counts: Counter = field(default_factory=Counter)
    config: SelectionConfig = field(default_factory=SelectionConfig)

    @property
    def words(self) -> list[str]:
        return [c.word for c in self.chosen]

    def to_json(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "chosen": [{"step": c.step_index, "word": c.word, "gain": c.marginal_gain} for c in self.chosen],
            "credited": [[b[0], b[1], n] for b, n in sorted(self.credited.items())],
            "raw_selected_counts": [[b[0], b[1], n] for b, n in sorted(self.raw_selected_counts.items())],
        }


@dataclass(frozen=True)
class CoverageMetrics:
    coverage: float
    mean_credited: float
    uncovered: list


def _tie_key(word: str, frequency: int, tie_break: TieBreak):
    if tie_break is TieBreak.BY_FREQUENCY_THEN_LEX:
        return (-frequency, word)
    return (word,)


def marginal_gain(occurrences, credited, k: int) -> int:
    return sum(max(0, min(n, k - credited.get(b, 0))) for b, n in occurrences.items())


def _report_bigrams(report):
    return set(report.bigrams) if hasattr(report, "bigrams") else set(report)


def _prepare(candidates, report):
    universe = _report_bigrams(report)
    items = {}
    for cand in candidates:
        word = getattr(cand, "surface", None) or str(cand.word)
        if word in items:
            continue
        occ = Counter({b: n for b, n in cand.missing_bigrams.items() if b in universe and n > 0})
        items[word] = (occ, getattr(cand, "target_frequency", 0))
    return items


def select_words_greedy(candidates, report, config: SelectionConfig | None = None, check: bool = False) -> SelectionResult:
    """Pick up to ``config.budget`` words, each with maximal marginal gain.

    Stops early once the best remaining gain is zero.  Ties follow
    ``config.tie_break``.  ``check=True`` rescans every candidate at every
    step and asserts the lazy argmax agrees.
    """
    config = config or SelectionConfig()
    k = config.k
    items = _prepare(candidates, report)
    result = SelectionResult(config=config)
    credited = result.credited

    heap = []
    for word, (occ, freq) in items.items():
        gain = marginal_gain(occ, credited, k)
        if gain > 0:
            heap.append((-gain, _tie_key(word, freq, config.tie_break), word))
    heapq.heapify(heap)

    while heap and len(result.chosen) < config.budget:
        neg_stale, key, word = heapq.heappop(heap)
        occ, freq = items[word]
        gain = marginal_gain(occ, credited, k)
        if gain <= 0:
            continue
        entry = (-gain, key, word)
        if heap and entry > heap[0]:
            heapq.heappush(heap, entry)
            continue
        if check:
            _check_argmax(items, credited, k, config.tie_break, word, gain, {c.word for c in result.chosen})
        for b, n in occ.items():
            credit = min(n, k - credited.get(b, 0))
            if credit > 0:
                credited[b] += credit
            result.raw_selected_counts[b] += n
        result.chosen.append(ChosenWord(word, gain, len(result.chosen)))
    return result


def _check_argmax(items, credited, k, tie_break, picked, gain, taken):
    best = None
    for word, (occ, freq) in items.items():
        if word in taken:
            continue
        entry = (-marginal_gain(occ, credited, k), _tie_key(word, freq, tie_break))
        if best is None or entry < best[0]:
            best = (entry, word)
    assert best is not None and best[1] == picked and -best[0][0] == gain, (picked, best)


def coverage_of_selection(result: SelectionResult, report) -> CoverageMetrics:
    bigrams = list(report.bigrams) if hasattr(report, "bigrams") else list(report)
    if not bigrams:
        return CoverageMetrics(0.0, 0.0, [])
    covered = sum(1 for b in bigrams if result.credited.get(b, 0) >= 1)
    total = sum(result.credited.get(b, 0) for b in bigrams)
    uncovered = [b for b in bigrams if result.credited.get(b, 0) < 1]
    return CoverageMetrics(covered / len(bigrams), total / len(bigrams), uncovered)
