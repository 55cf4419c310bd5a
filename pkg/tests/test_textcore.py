import unicodedata

import pytest
from hypothesis import given, strategies as st

from oovcover.errors import TextDecodeError
from oovcover.textcore import (
    Bigram, ScriptClass, SegmentationMode, extract_bigrams, normalize_text, segment_units, tokenize_words,
)

CP = SegmentationMode.CODEPOINT
GR = SegmentationMode.GRAPHEME

indic_text = st.lists(
    st.sampled_from(list("अआइकखगमनरसतािीुेो्ंँ़ aAbB.,।!?\"()") + ["\u200d", "\u200c", "\u0915\u093c", "\u0958", "\t", "\n"]),
    max_size=40,
).map("".join)


def test_normalize_collapses_whitespace():
    assert normalize_text("अब  तक ") == "अब तक"


def test_normalize_empty():
    assert normalize_text("") == ""


def test_normalize_nukta_single_canonical_form():
    decomposed = "\u0915\u093c"
    precomposed = "\u0958"
    # reference: the Unicode database's own canonical composition
    expected = unicodedata.normalize("NFC", decomposed)
    assert normalize_text(decomposed) == expected
    assert normalize_text(precomposed) == expected
    # U+0958 is a composition exclusion, so NFC is the two-scalar form
    assert expected == decomposed


def test_normalize_composes_latin():
    assert normalize_text("é") == "é"


def test_normalize_keeps_lines_and_joiners_and_digits():
    assert normalize_text("  \u0915\u094d\u200d\u0937  \n\n \u0967\u0968 34 ") == "\u0915\u094d\u200d\u0937\n\n\u0967\u0968 34"


def test_normalize_bad_bytes_names_offset():
    with pytest.raises(TextDecodeError) as err:
        normalize_text(b"ab\xffcd")
    assert err.value.offset == 2
    assert "offset 2" in str(err.value)


def test_normalize_bytes_ok():
    assert normalize_text("राम  सीता".encode()) == "राम सीता"


def test_normalize_keeps_trailing_blank_lines():
    assert normalize_text("\n\t") == "\n"
    assert normalize_text("ab\r\n") == "ab\n"
    assert normalize_text("a\u2028b") == "a\nb"


@given(indic_text)
def test_normalize_idempotent(text):
    once = normalize_text(text)
    assert normalize_text(once) == once
    for line in once.split("\n"):
        assert line == line.strip()
        assert "  " not in line


def test_tokenize_strips_punctuation():
    assert [t.surface for t in tokenize_words("राम, सीता।")] == ["राम", "सीता"]


def test_tokenize_script_classes():
    toks = tokenize_words("AISEC योजना")
    assert [(t.surface, t.script_class) for t in toks] == [
        ("AISEC", ScriptClass.LATIN), ("योजना", ScriptClass.DEVANAGARI)]
    # the block tables agree with the Unicode character names
    assert all(unicodedata.name(c).startswith("DEVANAGARI") for c in "योजना")
    assert all(unicodedata.name(c).startswith("LATIN") for c in "AISEC")


def test_tokenize_empty():
    assert tokenize_words("") == []


def test_tokenize_mixed_other_and_digits():
    toks = {t.surface: t.script_class for t in tokenize_words("WiFiवाला தமிழ் 2024 ५०रुपये (“quoted”) ...")}
    assert toks["WiFiवाला"] is ScriptClass.MIXED
    assert toks["தமிழ்"] is ScriptClass.TAMIL
    assert toks["2024"] is ScriptClass.OTHER
    assert toks["५०रुपये"] is ScriptClass.OTHER
    assert "quoted" in toks
    assert "..." not in toks and "" not in toks


def test_tokenize_splits_on_inner_danda():
    assert [t.surface for t in tokenize_words("राम।सीता")] == ["राम", "सीता"]


@given(indic_text)
def test_tokens_have_no_whitespace_or_sentence_punct(text):
    for tok in tokenize_words(normalize_text(text)):
        assert tok.surface
        assert not any(c.isspace() for c in tok.surface)
        assert not any(c in "।॥,;:?!" for c in tok.surface)


@given(indic_text)
def test_tokenize_deterministic(text):
    a = tokenize_words(normalize_text(text.encode("utf-8")))
    b = tokenize_words(normalize_text(text.encode("utf-8")))
    assert a == b


def test_bigrams_basic():
    assert extract_bigrams("abc", CP) == {Bigram("a", "b"): 1, Bigram("b", "c"): 1}


def test_bigrams_multiplicity():
    assert extract_bigrams("abab", CP) == {Bigram("a", "b"): 2, Bigram("b", "a"): 1}


def test_bigrams_single_unit():
    assert extract_bigrams("a", CP) == {}


def test_grapheme_mode_keeps_matras():
    assert segment_units("किताब", GR) == ["कि", "ता", "ब"]
    assert segment_units("किताब", CP) == list("किताब")


def test_joiners_never_standalone():
    word = "\u0915\u094d\u200d\u0937"
    for mode in (CP, GR):
        units = segment_units(word, mode)
        assert "\u200d" not in units
        assert "".join(units) == word
    assert segment_units(word, CP) == ["\u0915", "\u094d\u200d", "\u0937"]


@given(indic_text)
def test_bigram_count_is_units_minus_one(text):
    for tok in tokenize_words(normalize_text(text)):
        for mode in (CP, GR):
            units = segment_units(tok, mode)
            assert sum(extract_bigrams(tok, mode).values()) == max(0, len(units) - 1)
            assert "".join(units) == tok.surface
        assert len(segment_units(tok, CP)) >= len(segment_units(tok, GR))


def test_mode_parse():
    assert SegmentationMode.parse("GraphemeCluster") is GR
    assert SegmentationMode.parse("codepoint") is CP
