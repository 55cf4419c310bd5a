"""Coverage analysis and capped greedy word selection for TTS OOV recording."""

__version__ = "0.1.0"

from .corpus import FrequencyTable, corpus_stats, ingest_corpus, load_table, merge_tables, save_table
from .coverage import (
    CoverageVerdict, MissingBigramReport, Status, classify_word, count_consecutive_vowel_words,
    find_oov_candidates, missing_bigram_report,
)
from .scriptgen import RecordingScript, generate_recording_script, validate_script
from .selection import SelectionConfig, SelectionResult, coverage_of_selection, select_words_greedy
from .textcore import Bigram, SegmentationMode, WordToken, extract_bigrams, normalize_text, tokenize_words

__all__ = [
    "Bigram", "CoverageVerdict", "FrequencyTable", "MissingBigramReport", "RecordingScript",
    "SegmentationMode", "SelectionConfig", "SelectionResult", "Status", "WordToken",
    "classify_word", "corpus_stats", "count_consecutive_vowel_words", "coverage_of_selection",
    "extract_bigrams", "find_oov_candidates", "generate_recording_script", "ingest_corpus",
    "load_table", "merge_tables", "missing_bigram_report", "normalize_text", "save_table",
    "select_words_greedy", "tokenize_words", "validate_script",
]
