import random
import sys
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oovcover.corpus import table_from_word_counts  # noqa: E402
from oovcover.textcore import SegmentationMode  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


def make_table(words, mode=SegmentationMode.CODEPOINT):
    """Table from a word->count mapping or an iterable of words (count 1 each)."""
    return table_from_word_counts(Counter(words), mode)


def random_words(rng, n, alphabet="abcde", min_len=1, max_len=5):
    return ["".join(rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len))) for _ in range(n)]


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
