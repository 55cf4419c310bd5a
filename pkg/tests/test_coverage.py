import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import make_table, random_words
from oovcover.coverage import (
    CoverageVerdict, MissingBigramReport, Status, classify_word, count_consecutive_vowel_words,
    find_oov_candidates, load_vowel_set, missing_bigram_report,
)
from oovcover.errors import ConfigError, ModeMismatchError
from oovcover.textcore import Bigram, SegmentationMode

B = Bigram


def test_classify_iv():
    v = classify_word("ab", make_table(["ab"]))
    assert v.status is Status.IV and not v.missing_bigrams


def test_classify_oov():
    v = classify_word("abc", make_table(["ab"]))
    assert v.status is Status.OOV
    assert v.missing_bigrams == {B("b", "c"): 1}


def test_classify_single_unit_is_iv():
    assert classify_word("x", make_table([])).status is Status.IV


def test_classify_mode_follows_training():
    training = make_table(["कि"], SegmentationMode.GRAPHEME)
    assert classify_word("किता", training).missing_bigrams == {B("कि", "ता"): 1}


def test_report_hand_evaluation():
    training = make_table(["ab"])
    target = make_table({"ab": 5, "bc": 9, "cd": 2})
    rep = missing_bigram_report(training, target, 3)
    assert [(e.bigram, e.target_count) for e in rep] == [(B("b", "c"), 9)]
    assert rep.entries[0].example_words == ("bc",)


def test_report_empty_when_tables_equal():
    t = make_table(["abc", "cde"])
    assert len(missing_bigram_report(t, t, 1)) == 0


def test_report_errors():
    with pytest.raises(ModeMismatchError):
        missing_bigram_report(make_table([]), make_table([], SegmentationMode.GRAPHEME), 1)
    with pytest.raises(ConfigError):
        missing_bigram_report(make_table([]), make_table([]), 0)


def test_report_examples_capped_and_ranked():
    target = make_table({f"x{c}y": n for n, c in enumerate("abcdefg", 1)} | {"xy": 100})
    rep = missing_bigram_report(make_table([]), target, 1)
    xy = next(e for e in rep if e.bigram == B("x", "y"))
    assert xy.example_words == ("xy",)
    ya = next(e for e in rep if e.bigram == B("x", "g"))
    assert ya.example_words == ("xgy",)
    assert all(len(e.example_words) <= 5 for e in rep)


def test_report_json_roundtrip():
    rep = missing_bigram_report(make_table(["ab"]), make_table({"bcd": 4, "cde": 2}), 1)
    back = MissingBigramReport.from_json(rep.to_json())
    assert back.entries == rep.entries and back.min_frequency == 1
    assert rep.to_tsv().splitlines()[0] == "first\tsecond\ttarget_count\texamples"


def test_candidates_basic():
    training = make_table(["ab"])
    target = make_table({"abc": 3})
    rep = missing_bigram_report(training, target, 1)
    rep.entries = [e for e in rep.entries if e.bigram == B("b", "c")]
    cands = find_oov_candidates(training, target, rep)
    assert [c.surface for c in cands] == ["abc"]
    assert cands[0].missing_bigrams == {B("b", "c"): 1}
    assert cands[0].target_frequency == 3


def test_candidates_empty_report():
    t = make_table(["abc"])
    assert find_oov_candidates(t, t, MissingBigramReport([])) == []


def test_candidates_skip_digits():
    target = make_table({"a1b": 50, "ab": 5})
    rep = missing_bigram_report(make_table([]), target, 1)
    assert [c.surface for c in find_oov_candidates(make_table([]), target, rep)] == ["ab"]


def test_verdict_json_roundtrip():
    v = classify_word("abc", make_table(["ab"]), 7)
    back = CoverageVerdict.from_json(v.to_json())
    assert back == v


def _random_case(rng):
    alphabet = rng.choice(["abcd", "abcdef", "ab1c"])
    training = random_words(rng, rng.randint(0, 15), alphabet)
    target = Counter(random_words(rng, rng.randint(1, 200), alphabet))
    return training, target


def test_oracle_classify(rng):
    for _ in range(200):
        training, target = _random_case(rng)
        t = make_table(training)
        for w in target:
            status, missing = oracles.classify(w, training)
            v = classify_word(w, t)
            assert v.status.value == status
            assert {tuple(k): n for k, n in v.missing_bigrams.items()} == missing


def test_oracle_report_and_candidates(rng):
    for _ in range(200):
        training, target = _random_case(rng)
        mf = rng.randint(1, 6)
        tr, tg = make_table(training), make_table(target)
        rep = missing_bigram_report(tr, tg, mf)
        expected = oracles.missing_report(training, target, mf)
        assert [(tuple(e.bigram), e.target_count) for e in rep] == expected
        cands = find_oov_candidates(tr, tg, rep)
        assert [c.surface for c in cands] == oracles.candidates(target, [b for b, _ in expected])


def test_oracle_vowels(rng):
    for _ in range(200):
        words = Counter(random_words(rng, 50, "aeibcd", 1, 6))
        vowels = set(rng.sample("aeibcd", rng.randint(1, 4)))
        assert count_consecutive_vowel_words(make_table(words), vowels) == oracles.vowel_pairs(words, vowels)


def test_vowels_hand():
    assert count_consecutive_vowel_words(make_table({"aa": 1}), {"a"}) == (1, 1)
    assert count_consecutive_vowel_words(make_table({"abc": 1}), {"a"}) == (0, 0)
    with pytest.raises(ConfigError):
        count_consecutive_vowel_words(make_table({"aa": 1}), set())


def test_vowel_inventories():
    hi = load_vowel_set("hi")
    assert "अ" in hi and "ा" in hi and "्" not in hi and "क" not in hi
    ta = load_vowel_set("ta")
    assert "அ" in ta and "ா" in ta
    en = load_vowel_set("en")
    assert set("aeiouAEIOU") == en
    assert load_vowel_set("hi+en") == hi | en
    with pytest.raises(ConfigError):
        load_vowel_set("xx")
    # AISEC-style abbreviation: A-I and E... are consecutive vowel pairs
    assert count_consecutive_vowel_words(make_table(["AISEC", "IAEA"]), en) == (2, 4)


def test_vowel_grapheme_mode_uses_base_char():
    table = make_table(["आई", "कि"], SegmentationMode.GRAPHEME)
    assert count_consecutive_vowel_words(table, load_vowel_set("hi")) == (1, 1)


words_st = st.lists(st.text(alphabet="abcd", min_size=1, max_size=5), max_size=15)


@settings(max_examples=100)
@given(words_st, st.text(alphabet="abcd", min_size=1, max_size=6))
def test_iv_oov_partition_and_flip(training, word):
    t = make_table(training)
    v = classify_word(word, t)
    assert (v.status is Status.IV) == (not v.missing_bigrams)
    for b in v.missing_bigrams:
        assert t.bigram_count(b) == 0
    grown = make_table(training + [word])
    assert classify_word(word, grown).status is Status.IV


@settings(max_examples=100)
@given(words_st, words_st, st.text(alphabet="abcd", min_size=1, max_size=6))
def test_monotone_in_training(training, extra, word):
    small = classify_word(word, make_table(training))
    big = classify_word(word, make_table(training + extra))
    if small.status is Status.IV:
        assert big.status is Status.IV


@settings(max_examples=100)
@given(words_st, st.lists(st.text(alphabet="ab1cd", min_size=1, max_size=5), min_size=1, max_size=30),
       st.integers(1, 3))
def test_candidate_completeness(training, target, mf):
    tr, tg = make_table(training), make_table(target)
    rep = missing_bigram_report(tr, tg, mf)
    cands = find_oov_candidates(tr, tg, rep)
    names = {c.surface for c in cands}
    wanted = set(rep.bigrams)
    assert all(c.status is Status.OOV for c in cands)
    for w in tg.word_counts:
        if w not in names:
            assert any(ch.isdigit() for ch in w) or not any(b in wanted for b in oracles.codepoint_bigrams(w))


def test_report_is_deterministic_across_insertion_order():
    rng = random.Random(3)
    words = random_words(rng, 300, "abcdef")
    a = missing_bigram_report(make_table(words[:5]), make_table(words), 2)
    shuffled = list(words)
    rng.shuffle(shuffled)
    b = missing_bigram_report(make_table(words[:5]), make_table(shuffled), 2)
    assert a.entries == b.entries
