"""Intelligibility error rates and objective quality aggregation.

Ratings are binary (1 = intelligible).  A cell's error rate is the share of
unintelligible judgements.  With ``average_voices`` the rate is computed per
TTS voice first and the voices are then averaged without weights.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from .benchmark import Category, categories_for, language_tag
from .coverage import Status
from .errors import ConfigError, MissingCategoryError

RATING_COLUMNS = ("sample_id", "language", "system", "train_condition", "test_condition",
                  "voice", "category", "word", "rater_id", "intelligible")

CELL_FIELDS = ("language", "system", "train_condition", "test_condition", "category")


class System(str, enum.Enum):
    FP = "FP"
    VITS = "VITS"

    @classmethod
    def parse(cls, value) -> "System":
        if isinstance(value, cls):
            return value
        v = str(value).strip().upper().replace(" ", "")
        return cls({"FASTPITCH": "FP"}.get(v, v))


class TrainCondition(str, enum.Enum):
    I = "I"  # noqa: E741
    I_O = "I+O"
    I_M1M2 = "I+M1M2"
    I_F1 = "I+F1"

    @classmethod
    def parse(cls, value) -> "TrainCondition":
        if isinstance(value, cls):
            return value
        v = str(value).strip().upper().replace(" ", "")
        v = {"BASE": "I", "BASE+O": "I+O", "BASE+M1+M2": "I+M1M2", "I+M1+M2": "I+M1M2", "BASE+F1": "I+F1"}.get(v, v)
        return cls(v)


class Voice(str, enum.Enum):
    MALE = "Male"
    FEMALE = "Female"

    @classmethod
    def parse(cls, value) -> "Voice":
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower()
        return cls({"m": "Male", "male": "Male", "f": "Female", "female": "Female"}[v])


@dataclass(frozen=True)
class RatingRecord:
    sample_id: str
    language: str
    system: System
    train_condition: TrainCondition
    test_condition: Status
    voice: Voice
    category: Category
    word: str
    rater_id: str
    intelligible: int

    def __post_init__(self):
        object.__setattr__(self, "language", language_tag(self.language))
        if self.intelligible not in (0, 1):
            raise ConfigError(f"intelligible must be 0 or 1, got {self.intelligible!r}")

    @classmethod
    def from_row(cls, row: Mapping[str, str]) -> "RatingRecord":
        return cls(
            sample_id=row["sample_id"].strip(),
            language=language_tag(row["language"]),
            system=System.parse(row["system"]),
            train_condition=TrainCondition.parse(row["train_condition"]),
            test_condition=Status.parse(row["test_condition"]),
            voice=Voice.parse(row["voice"]),
            category=Category.parse(row["category"]),
            word=row["word"],
            rater_id=row["rater_id"].strip(),
            intelligible=int(row["intelligible"]),
        )

    def field(self, name: str):
        return getattr(self, name)


def read_ratings(text: str) -> list[RatingRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != RATING_COLUMNS:
        raise ConfigError("ratings CSV columns must be exactly: " + ",".join(RATING_COLUMNS))
    out = []
    for lineno, row in enumerate(reader, 2):
        try:
            out.append(RatingRecord.from_row(row))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"ratings line {lineno}: {exc}") from None
    return out


def write_ratings(records: Iterable[RatingRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RATING_COLUMNS)
    for r in records:
        w.writerow([r.sample_id, r.language, r.system.value, r.train_condition.value, r.test_condition.value,
                    r.voice.value, r.category.value, r.word, r.rater_id, r.intelligible])
    return buf.getvalue()


@dataclass(frozen=True)
class IERCell:
    rate: float
    errors: int
    total: int
    voices: tuple = ()


@dataclass
class IERTable:
    fields: tuple = CELL_FIELDS
    cells: dict = field(default_factory=dict)
    voice_averaged: bool = False

    def rate(self, *key):
        cell = self.cells.get(_norm_key(self.fields, key))
        return None if cell is None else cell.rate

    def get(self, *key):
        return self.cells.get(_norm_key(self.fields, key))

    @classmethod
    def from_rates(cls, rows: Iterable[Mapping], fields=CELL_FIELDS) -> "IERTable":
        """Table straight from already aggregated rates (e.g. transcribed ones)."""
        table = cls(tuple(fields), voice_averaged=True)
        for row in rows:
            key = _norm_key(table.fields, tuple(row[f] for f in table.fields))
            rate = float(row["rate"])
            if not 0.0 <= rate <= 1.0:
                raise ConfigError(f"rate out of range: {rate}")
            table.cells[key] = IERCell(rate, 0, 0)
        return table


_PARSERS = {
    "language": language_tag,
    "system": System.parse,
    "train_condition": TrainCondition.parse,
    "test_condition": Status.parse,
    "voice": Voice.parse,
    "category": Category.parse,
}


def _norm_key(fields, key) -> tuple:
    if len(key) == 1 and isinstance(key[0], tuple):
        key = key[0]
    if len(key) != len(fields):
        raise ConfigError(f"key {key!r} does not match fields {fields!r}")
    return tuple(_PARSERS.get(f, lambda x: x)(v) for f, v in zip(fields, key))


def _majority(records: Sequence[RatingRecord]):
    # one trial per rated sample; ties count as unintelligible
    votes = defaultdict(list)
    for r in records:
        votes[(r.sample_id, r.word)].append(r.intelligible)
    return [1 if 2 * sum(v) > len(v) else 0 for _, v in sorted(votes.items())]


def compute_ier(ratings: Iterable[RatingRecord], fields=CELL_FIELDS, average_voices: bool = True,
                majority: bool = False) -> IERTable:
    """Error rate per cell keyed by ``fields``.

    ``majority=True`` first collapses each sample's raters to one majority
    vote.  Voice averaging applies only when ``voice`` is not a key field.
    """
    fields = tuple(fields)
    by_voice = average_voices and "voice" not in fields
    groups: dict = defaultdict(list)
    for r in ratings:
        key = tuple(r.field(f) for f in fields)
        sub = r.voice if by_voice else None
        groups[(key, sub)].append(r)

    per_voice: dict = defaultdict(dict)
    for (key, sub), recs in groups.items():
        trials = _majority(recs) if majority else [r.intelligible for r in recs]
        errors = len(trials) - sum(trials)
        per_voice[key][sub] = (errors, len(trials))

    table = IERTable(fields, voice_averaged=by_voice)
    for key in sorted(per_voice, key=_sort_key):
        parts = per_voice[key]
        rates = [e / n for e, n in parts.values()]
        errors = sum(e for e, _ in parts.values())
        total = sum(n for _, n in parts.values())
        voices = tuple(sorted(v.value for v in parts if v is not None))
        table.cells[key] = IERCell(fmean(rates), errors, total, voices)
    return table


def _sort_key(key):
    return tuple(str(getattr(k, "value", k)) for k in key)


def _category_order(language) -> tuple:
    try:
        return categories_for(language)
    except ConfigError:
        return ()


def category_average(table: IERTable, filter: Mapping | None = None, categories=None) -> dict:
    """Unweighted mean across categories for every non-category key matching ``filter``.

    All categories configured for the key's language must be present;
    otherwise :class:`MissingCategoryError` names the first absent one.
    Returns ``{key_without_category: mean_rate}``.
    """
    fields = table.fields
    if "category" not in fields:
        raise ConfigError("table has no category field")
    ci = fields.index("category")
    want = {}
    for f, v in (filter or {}).items():
        want[fields.index(f)] = _PARSERS.get(f, lambda x: x)(v)
    groups: dict = defaultdict(dict)
    for key, cell in table.cells.items():
        if any(key[i] != v for i, v in want.items()):
            continue
        rest = key[:ci] + key[ci + 1:]
        groups[rest][key[ci]] = cell.rate
    out = {}
    for rest, by_cat in sorted(groups.items(), key=lambda kv: _sort_key(kv[0])):
        lang = rest[fields.index("language")] if "language" in fields else None
        cats = tuple(Category.parse(c) for c in categories) if categories else _category_order(lang)
        if not cats:
            cats = tuple(sorted(by_cat, key=lambda c: c.value))
        for c in cats:
            if c not in by_cat:
                raise MissingCategoryError(c.value, "/".join(_sort_key(rest)))
        out[rest] = fmean(by_cat[c] for c in cats)
    return out


def relative_reduction(base: float, improved: float):
    """Percent drop from ``base`` to ``improved``; None when base is 0."""
    if base == 0:
        return None
    return 100.0 * (base - improved) / base


GENDER_CONDITIONS = (TrainCondition.I, TrainCondition.I_M1M2, TrainCondition.I_F1)


def single_gender_comparison(ratings: Iterable[RatingRecord], system=System.FP, majority: bool = False) -> dict:
    """Category-averaged OOV error per (language, train condition, voice).

    Returns ``{language: {(condition, voice): rate or None}}`` covering the
    three conditions and both voices; absent combinations map to None.
    """
    system = System.parse(system)
    recs = [r for r in ratings if r.system is system and r.test_condition is Status.OOV]
    table = compute_ier(recs, ("language", "train_condition", "voice", "category"), majority=majority)
    out: dict = {}
    for lang in sorted({k[0] for k in table.cells}):
        row = {}
        for cond in GENDER_CONDITIONS:
            for voice in (Voice.FEMALE, Voice.MALE):
                filt = {"language": lang, "train_condition": cond, "voice": voice}
                try:
                    avg = category_average(table, filt)
                except MissingCategoryError:
                    avg = {}
                row[(cond, voice)] = next(iter(avg.values()), None)
        out[lang] = row
    return out


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple
    source_id: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ConfigError("embedding is empty")
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError(f"embedding {self.source_id!r} has non-finite values")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


def _values(v):
    return v.values if isinstance(v, EmbeddingVector) else tuple(float(x) for x in v)


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a| |b|), accumulated with exact float summation."""
    x, y = _values(a), _values(b)
    if len(x) != len(y):
        raise ConfigError(f"length mismatch: {len(x)} vs {len(y)}")
    # scale to the largest magnitude so squares neither overflow nor underflow
    sx = max(map(abs, x), default=0.0)
    sy = max(map(abs, y), default=0.0)
    if sx == 0.0 or sy == 0.0:
        raise ConfigError("cosine similarity of a zero vector is undefined")
    x = [v / sx for v in x]
    y = [v / sy for v in y]
    dot = math.fsum(p * q for p, q in zip(x, y))
    nx = math.sqrt(math.fsum(p * p for p in x))
    ny = math.sqrt(math.fsum(q * q for q in y))
    return max(-1.0, min(1.0, dot / (nx * ny)))


QUALITY_CONDITIONS = ("Base", "I+O")


def quality_key(language, model, voice, condition) -> tuple:
    cond = "Base" if TrainCondition.parse(condition) is TrainCondition.I else "I+O"
    model = System.parse(model).value
    return (language_tag(language), model, Voice.parse(voice).value, cond)


@dataclass
class QualityTable:
    rows: dict = field(default_factory=dict)   # (lang, model, voice) -> {"ssim": {cond: x}, "visqol": {cond: x}}


def quality_report(ssim_pairs: Mapping, visqol_scores: Mapping) -> QualityTable:
    """Mean S-SIM and mean ingested perceptual score per (language, model, voice, condition).

    Both mappings are keyed by ``(language, model, voice, condition)``;
    ``ssim_pairs`` values are lists of (reference, synthesized) embeddings.
    """
    table = QualityTable()
    for metric, data in (("ssim", ssim_pairs), ("visqol", visqol_scores)):
        for raw_key, items in data.items():
            key = quality_key(*raw_key)
            items = list(items)
            if not items:
                raise ConfigError(f"no {metric} values for cell {key}")
            if metric == "ssim":
                value = fmean(cosine_similarity(ref, syn) for ref, syn in items)
            else:
                value = fmean(float(s) for s in items)
            slot = table.rows.setdefault(key[:3], {"ssim": {}, "visqol": {}})
            slot[metric][key[3]] = value
    return table


def read_embeddings(text: str, prefix: str = "") -> list[EmbeddingVector]:
    """One comma-separated vector per line; ``source_id`` is the 1-based line number."""
    out = []
    for i, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            vals = [float(x) for x in line.split(",")]
        except ValueError:
            raise ConfigError(f"embeddings line {i}: not a list of reals") from None
        out.append(EmbeddingVector(vals, f"{prefix}{i}"))
    return out


MANIFEST_COLUMNS = ("source_id", "language", "model", "voice", "condition", "role", "pair")


def pair_embeddings(vectors: Sequence[EmbeddingVector], manifest_text: str) -> dict:
    """Group vectors into (reference, synthesized) pairs per quality cell.

    The manifest CSV has columns ``source_id, language, model, voice,
    condition, role, pair`` where role is ``reference`` or ``synthesized``
    and rows sharing ``pair`` within a cell form one comparison.
    """
    by_id = {v.source_id: v for v in vectors}
    reader = csv.DictReader(io.StringIO(manifest_text))
    if tuple(reader.fieldnames or ()) != MANIFEST_COLUMNS:
        raise ConfigError("embedding manifest columns must be: " + ",".join(MANIFEST_COLUMNS))
    slots: dict = defaultdict(dict)
    for row in reader:
        sid = row["source_id"].strip()
        if sid not in by_id:
            raise ConfigError(f"manifest references unknown source_id {sid}")
        role = row["role"].strip().lower()
        if role not in ("reference", "synthesized"):
            raise ConfigError(f"bad role {row['role']!r}")
        key = quality_key(row["language"], row["model"], row["voice"], row["condition"])
        slot = slots[(key, row["pair"].strip())]
        if role in slot:
            raise ConfigError(f"pair {row['pair']} has two {role} vectors")
        slot[role] = by_id[sid]
    out: dict = defaultdict(list)
    for (key, pair), slot in sorted(slots.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        if len(slot) != 2:
            raise ConfigError(f"pair {pair} in {key} is incomplete")
        out[key].append((slot["reference"], slot["synthesized"]))
    return dict(out)


def read_quality_scores(text: str) -> dict:
    """CSV ``cell,score`` where cell is ``language|model|voice|condition``."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != ("cell", "score"):
        raise ConfigError("quality score CSV columns must be: cell,score")
    out: dict = defaultdict(list)
    for row in reader:
        parts = row["cell"].split("|")
        if len(parts) != 4:
            raise ConfigError(f"bad cell key {row['cell']!r}")
        out[quality_key(*parts)].append(float(row["score"]))
    return dict(out)


def _plain(v):
    return getattr(v, "value", v)


def ier_to_json(table: IERTable) -> dict:
    return {
        "fields": list(table.fields),
        "voice_averaged": table.voice_averaged,
        "cells": [
            {"key": [_plain(k) for k in key], "rate": c.rate, "errors": c.errors, "total": c.total,
             "voices": list(c.voices)}
            for key, c in table.cells.items()
        ],
    }


def ier_from_json(obj: dict) -> IERTable:
    table = IERTable(tuple(obj["fields"]), voice_averaged=obj.get("voice_averaged", False))
    for c in obj["cells"]:
        key = _norm_key(table.fields, tuple(c["key"]))
        table.cells[key] = IERCell(c["rate"], c.get("errors", 0), c.get("total", 0), tuple(c.get("voices", ())))
    return table


def single_gender_to_json(result: dict) -> list:
    return [{"language": lang, "condition": cond.value, "voice": voice.value, "rate": rate}
            for lang, row in sorted(result.items()) for (cond, voice), rate in row.items()]


def single_gender_from_json(rows: list) -> dict:
    out: dict = {}
    for r in rows:
        out.setdefault(r["language"], {})[(TrainCondition.parse(r["condition"]), Voice.parse(r["voice"]))] = r["rate"]
    return out


def quality_to_json(table: QualityTable) -> list:
    return [{"language": k[0], "model": k[1], "voice": k[2], "ssim": v["ssim"], "visqol": v["visqol"]}
            for k, v in sorted(table.rows.items())]


def quality_from_json(rows: list) -> QualityTable:
    table = QualityTable()
    for r in rows:
        table.rows[(r["language"], r["model"], r["voice"])] = {"ssim": dict(r["ssim"]), "visqol": dict(r["visqol"])}
    return table
