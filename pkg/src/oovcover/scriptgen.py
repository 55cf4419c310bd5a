"""Recording scripts: selected words shuffled and joined five to a line.

Shuffling uses SplitMix64 (Steele, Lea & Flood 2014) with a Fisher-Yates
pass from the last index down; bounded draws use rejection sampling on the
raw 64-bit output so there is no modulo bias.  Words are sorted by code
point before shuffling, so the script depends only on the word set, the
group size and the seed, and any implementation of the same three steps
regenerates it exactly.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .corpus import FrequencyTable
from .errors import ConfigError, DuplicateWordsError
from .textcore import extract_bigrams

DEFAULT_GROUP_SIZE = 5
SEPARATOR = ", "
_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n


def shuffle(items: list, seed: int) -> list:
    out = list(items)
    rng = SplitMix64(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


@dataclass
class RecordingScript:
    utterances: list
    group_size: int = DEFAULT_GROUP_SIZE
    seed: int = 0
    language: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def words(self) -> list[str]:
        return [w for utt in self.utterances for w in utt]

    def lines(self) -> list[str]:
        return [SEPARATOR.join(utt) for utt in self.utterances]

    def render(self) -> str:
        lines = self.lines()
        return "\n".join(lines) + "\n" if lines else ""

    def sidecar(self) -> dict:
        index = {w: i for i, utt in enumerate(self.utterances) for w in utt}
        return {
            "generator": "splitmix64+fisher-yates",
            "seed": self.seed,
            "group_size": self.group_size,
            "language": self.language,
            "n_words": len(index),
            "n_utterances": len(self.utterances),
            "word_to_utterance": dict(sorted(index.items())),
            **({"meta": self.meta} if self.meta else {}),
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def generate_recording_script(words, group_size: int = DEFAULT_GROUP_SIZE, seed: int = 0,
                              language: str = "") -> RecordingScript:
    words = list(words)
    if group_size < 1:
        raise ConfigError("group_size must be >= 1")
    dupes = [w for w, n in Counter(words).items() if n > 1]
    if dupes:
        raise DuplicateWordsError(dupes)
    bad = [w for w in words if not w or any(c.isspace() for c in w) or "," in w]
    if bad:
        raise ConfigError("words must be non-empty, without whitespace or commas: " + ", ".join(map(repr, bad[:5])))
    order = shuffle(sorted(words), seed)
    utterances = [order[i:i + group_size] for i in range(0, len(order), group_size)]
    return RecordingScript(utterances, group_size, seed, language)


def parse_script(text: str, group_size: int = DEFAULT_GROUP_SIZE, seed: int = 0, language: str = "") -> RecordingScript:
    utterances = [[w.strip() for w in line.split(",") if w.strip()] for line in text.splitlines() if line.strip()]
    return RecordingScript(utterances, group_size, seed, language)


@dataclass
class ValidationReport:
    overlaps: list
    shared_bigrams: list
    utterance_word_counts: list
    group_size: int

    @property
    def passed(self) -> bool:
        return not self.overlaps

    @property
    def short_utterances(self) -> list[int]:
        # only the final utterance may be short
        counts = self.utterance_word_counts
        return [i for i, n in enumerate(counts[:-1]) if n != self.group_size]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "overlaps": self.overlaps,
            "shared_bigrams": [
                {"bigram": [b[0], b[1]], "script_words": s, "benchmark_words": t}
                for b, s, t in self.shared_bigrams
            ],
            "utterance_word_counts": self.utterance_word_counts,
        }


def validate_script(script: RecordingScript, benchmark_words, training: FrequencyTable) -> ValidationReport:
    """Check a script against benchmark words.

    Any shared word is a failure.  Bigrams missing from ``training`` that
    occur in both script and benchmark words are listed for information
    only; sharing bigrams is allowed.
    """
    script_words = script.words
    bench = set(benchmark_words)
    overlaps = sorted(set(script_words) & bench)

    def oov_index(words):
        index: dict = {}
        for w in sorted(set(words)):
            for b in extract_bigrams(w, training.mode):
                if training.bigram_counts.get(b, 0) == 0:
                    index.setdefault(b, []).append(w)
        return index

    s_index = oov_index(script_words)
    b_index = oov_index(bench)
    shared = [(b, s_index[b], b_index[b]) for b in sorted(s_index.keys() & b_index.keys())]
    return ValidationReport(overlaps, shared, [len(u) for u in script.utterances], script.group_size)
