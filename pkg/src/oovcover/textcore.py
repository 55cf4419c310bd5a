"""Text normalization, word tokenization and character-unit segmentation.

Two segmentation modes are supported.  ``CODEPOINT`` treats every Unicode
scalar as one unit; ``GRAPHEME`` uses extended grapheme clusters, so a
consonant is never separated from its vowel sign or virama.  In both modes
ZWJ/ZWNJ never form a unit of their own: they ride on the preceding unit.
"""

from __future__ import annotations

import enum
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import regex

from .errors import TextDecodeError

ZWNJ = "\u200c"
ZWJ = "\u200d"
_JOINERS = frozenset((ZWNJ, ZWJ))

# Characters that end a word even without surrounding whitespace.
SENTENCE_PUNCT = "\u0964\u0965,;:?!"
_SPLIT_TABLE = str.maketrans({c: " " for c in SENTENCE_PUNCT})

_EDGE_PUNCT = regex.compile(r"^[\p{P}\u200c\u200d]+|[\p{P}\u200c\u200d]+$")
# the same boundaries str.splitlines uses
_LINE_BREAK = regex.compile(r"\r\n|[\n\r\v\f\x1c-\x1e\x85\u2028\u2029]")
_GRAPHEME = regex.compile(r"\X")


class SegmentationMode(str, enum.Enum):
    CODEPOINT = "codepoint"
    GRAPHEME = "grapheme"

    @classmethod
    def parse(cls, value: "str | SegmentationMode") -> "SegmentationMode":
        if isinstance(value, cls):
            return value
        value = str(value).strip().lower()
        aliases = {"graphemecluster": "grapheme", "grapheme_cluster": "grapheme", "cluster": "grapheme"}
        return cls(aliases.get(value, value))


class ScriptClass(str, enum.Enum):
    DEVANAGARI = "Devanagari"
    TAMIL = "Tamil"
    LATIN = "Latin"
    MIXED = "Mixed"
    OTHER = "Other"


class Bigram(NamedTuple):
    first: str
    second: str

    def __str__(self):
        return self.first + self.second


@dataclass(frozen=True)
class WordToken:
    surface: str
    script_class: ScriptClass

    def __str__(self):
        return self.surface


_RANGES = (
    (0x0041, 0x005A, ScriptClass.LATIN),
    (0x0061, 0x007A, ScriptClass.LATIN),
    (0x00C0, 0x00D6, ScriptClass.LATIN),
    (0x00D8, 0x00F6, ScriptClass.LATIN),
    (0x00F8, 0x024F, ScriptClass.LATIN),
    (0x0900, 0x097F, ScriptClass.DEVANAGARI),
    (0x0B80, 0x0BFF, ScriptClass.TAMIL),
    (0x1CD0, 0x1CFF, ScriptClass.DEVANAGARI),
    (0x1E00, 0x1EFF, ScriptClass.LATIN),
    (0x2C60, 0x2C7F, ScriptClass.LATIN),
    (0xA720, 0xA7FF, ScriptClass.LATIN),
    (0xA8E0, 0xA8FF, ScriptClass.DEVANAGARI),
    (0xFF21, 0xFF3A, ScriptClass.LATIN),
    (0xFF41, 0xFF5A, ScriptClass.LATIN),
    (0x11FC0, 0x11FFF, ScriptClass.TAMIL),
)


def char_script(ch: str) -> ScriptClass | None:
    """Script class of a single character, or None for script-neutral ones.

    Punctuation, symbols, joiners and combining marks outside the known
    blocks are neutral.  Letters from any other script are OTHER.
    """
    cp = ord(ch)
    for lo, hi, cls in _RANGES:
        if lo <= cp <= hi:
            if unicodedata.category(ch)[0] in "PZ":
                # danda and friends are shared across scripts
                return None
            return cls
    if unicodedata.category(ch)[0] == "L":
        return ScriptClass.OTHER
    return None


def classify_script(surface: str) -> ScriptClass:
    if any(ch.isdecimal() for ch in surface):
        return ScriptClass.OTHER
    found = set()
    for ch in surface:
        cls = char_script(ch)
        if cls is not None:
            found.add(cls)
    if len(found) >= 2:
        return ScriptClass.MIXED
    if found:
        return found.pop()
    return ScriptClass.OTHER


def has_digit(surface: str) -> bool:
    return any(ch.isdecimal() for ch in surface)


def decode_utf8(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TextDecodeError(exc.start, exc.reason) from None


def normalize_line(line: str) -> str:
    return " ".join(unicodedata.normalize("NFC", line).split())


def normalize_text(raw: str | bytes) -> str:
    """Return NFC text with each line stripped and whitespace runs collapsed.

    Line structure is kept.  Bytes are decoded as strict UTF-8; a bad
    sequence raises :class:`TextDecodeError` carrying its byte offset.
    """
    if isinstance(raw, (bytes, bytearray)):
        raw = decode_utf8(bytes(raw))
    if not raw:
        return ""
    text = _LINE_BREAK.sub("\n", unicodedata.normalize("NFC", raw))
    return "\n".join(" ".join(line.split()) for line in text.split("\n"))


def strip_edges(piece: str) -> str:
    return _EDGE_PUNCT.sub("", piece)


def split_raw(text: str) -> list[str]:
    """Whitespace and sentence-punctuation split, before edge stripping."""
    return text.translate(_SPLIT_TABLE).split()


def tokenize_words(text: str) -> list[WordToken]:
    tokens = []
    for piece in split_raw(text):
        surface = strip_edges(piece)
        if surface:
            tokens.append(WordToken(surface, classify_script(surface)))
    return tokens


def word_surfaces(text: str) -> list[str]:
    """Like :func:`tokenize_words` but returns bare strings."""
    out = []
    for piece in split_raw(text):
        surface = strip_edges(piece)
        if surface:
            out.append(surface)
    return out


def _attach_joiners(pieces) -> list[str]:
    units: list[str] = []
    pending = ""
    for piece in pieces:
        if piece in _JOINERS or (piece and all(c in _JOINERS for c in piece)):
            if units:
                units[-1] += piece
            else:
                pending += piece
            continue
        units.append(pending + piece)
        pending = ""
    if pending:
        # word made only of joiners; keep it as a single unit
        units.append(pending)
    return units


def segment_units(word: str | WordToken, mode: SegmentationMode | str = SegmentationMode.CODEPOINT) -> list[str]:
    surface = word.surface if isinstance(word, WordToken) else word
    mode = SegmentationMode.parse(mode)
    if mode is SegmentationMode.CODEPOINT:
        if ZWJ not in surface and ZWNJ not in surface:
            return list(surface)
        return _attach_joiners(surface)
    return _attach_joiners(_GRAPHEME.findall(surface))


def extract_bigrams(word: str | WordToken, mode: SegmentationMode | str = SegmentationMode.CODEPOINT) -> Counter:
    """Multiset of adjacent unit pairs; a word of n units yields n-1 occurrences."""
    units = segment_units(word, mode)
    return Counter(Bigram(a, b) for a, b in zip(units, units[1:]))
