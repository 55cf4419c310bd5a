"""Plain-text and JSON renderings of evaluation tables."""

from __future__ import annotations

from dataclasses import dataclass

from .benchmark import categories_for, language_name
from .coverage import Status
from .errors import ConfigError
from .evaluation import (
    GENDER_CONDITIONS, QUALITY_CONDITIONS, IERTable, QualityTable, System, TrainCondition, Voice,
    relative_reduction,
)

TITLE = "Intelligibility and quality report"
_TEST_LABEL = {Status.IV: "I", Status.OOV: "O"}


@dataclass
class Report:
    text: str
    data: dict


def _fmt(x, digits=2) -> str:
    return "-" if x is None else f"{x:.{digits}f}"


def _align(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def _ier_rows(table: IERTable):
    """Yield (language, system, train, test, {category: rate}) in table order."""
    if table.fields != ("language", "system", "train_condition", "test_condition", "category"):
        raise ConfigError("IER table must be keyed by language, system, train, test, category")
    rows: dict = {}
    for (lang, system, train, test, cat), cell in table.cells.items():
        rows.setdefault((lang, system, train, test), {})[cat] = cell.rate
    systems = list(System)
    trains = list(TrainCondition)
    tests = [Status.IV, Status.OOV]
    order = sorted(rows, key=lambda k: (k[0], systems.index(k[1]), trains.index(k[2]), tests.index(k[3])))
    for key in order:
        yield (*key, rows[key])


def _safe_average(rates: dict, lang):
    try:
        cats = categories_for(lang)
    except ConfigError:
        cats = sorted(rates, key=lambda c: c.value)
    if any(c not in rates for c in cats):
        return None
    return sum(rates[c] for c in cats) / len(cats)


def _ier_section(table: IERTable, text: list, data: dict):
    rows = list(_ier_rows(table))
    data["ier"] = []
    data["category_average"] = []
    averages = {}
    for lang in sorted({r[0] for r in rows}):
        try:
            cats = categories_for(lang)
        except ConfigError:
            cats = tuple(sorted({c for r in rows if r[0] == lang for c in r[4]}, key=lambda c: c.value))
        text.append(f"IER ({language_name(lang)})")
        grid = [["Lang.", "Sys.", "Train", "Test", *[c.value for c in cats], "Avg"]]
        for r_lang, system, train, test, rates in rows:
            if r_lang != lang:
                continue
            avg = _safe_average(rates, lang)
            averages[(lang, system, train, test)] = avg
            grid.append([language_name(lang), system.value, train.value, _TEST_LABEL[test],
                         *[_fmt(rates.get(c)) for c in cats], _fmt(avg)])
            data["ier"].append({
                "language": lang, "system": system.value, "train": train.value, "test": test.value,
                "rates": {c.value: rates.get(c) for c in cats},
            })
            data["category_average"].append({
                "language": lang, "system": system.value, "train": train.value, "test": test.value,
                "average": avg,
            })
        text.extend(_align(grid))
        text.append("")

    reductions = []
    for (lang, system, train, test), base in sorted(averages.items(), key=lambda kv: str(kv[0])):
        if train is not TrainCondition.I or test is not Status.OOV or base is None:
            continue
        improved = averages.get((lang, system, TrainCondition.I_O, Status.OOV))
        if improved is None:
            continue
        reductions.append({"language": lang, "system": system.value, "base": base,
                           "improved": improved, "reduction_pct": relative_reduction(base, improved)})
    data["relative_reduction"] = reductions
    if reductions:
        text.append("Relative OOV error reduction (I -> I+O)")
        grid = [["Lang.", "Sys.", "Base", "I+O", "Reduction %"]]
        for r in reductions:
            grid.append([language_name(r["language"]), r["system"], _fmt(r["base"], 4), _fmt(r["improved"], 4),
                         _fmt(r["reduction_pct"])])
        text.extend(_align(grid))
        text.append("")


def _gender_section(single_gender: dict, text: list, data: dict):
    text.append("OOV errors, single-gender finetuning (FP)")
    head = ["Lang."]
    for cond in GENDER_CONDITIONS:
        label = {"I": "Base", "I+M1M2": "Base+M1+M2", "I+F1": "Base+F1"}[cond.value]
        head += [f"{label} F", f"{label} M"]
    grid = [head]
    data["single_gender"] = []
    for lang in sorted(single_gender):
        row = single_gender[lang]
        cells = [language_name(lang)]
        for cond in GENDER_CONDITIONS:
            for voice in (Voice.FEMALE, Voice.MALE):
                val = row.get((cond, voice))
                cells.append(_fmt(val))
                data["single_gender"].append({"language": lang, "condition": cond.value,
                                              "voice": voice.value, "rate": val})
        grid.append(cells)
    text.extend(_align(grid))
    text.append("")


def _quality_section(quality: QualityTable, text: list, data: dict):
    text.append("Objective quality")
    grid = [["Lang.", "Model", "Voice", "S-SIM (Base)", "S-SIM (I+O)", "VISQOL (Base)", "VISQOL (I+O)"]]
    data["quality"] = []
    systems = list(System)
    for key in sorted(quality.rows, key=lambda k: (k[0], systems.index(System(k[1])), k[2])):
        lang, model, voice = key
        slot = quality.rows[key]
        vals = [slot["ssim"].get(c) for c in QUALITY_CONDITIONS] + [slot["visqol"].get(c) for c in QUALITY_CONDITIONS]
        grid.append([language_name(lang), model, voice, *[_fmt(v) for v in vals]])
        data["quality"].append({
            "language": lang, "model": model, "voice": voice,
            "ssim": {c: slot["ssim"].get(c) for c in QUALITY_CONDITIONS},
            "visqol": {c: slot["visqol"].get(c) for c in QUALITY_CONDITIONS},
        })
    text.extend(_align(grid))
    text.append("")


def render_report(ier: IERTable | None = None, single_gender: dict | None = None,
                  quality: QualityTable | None = None) -> Report:
    text = [TITLE, "=" * len(TITLE), ""]
    data: dict = {}
    if ier is not None and ier.cells:
        _ier_section(ier, text, data)
    if single_gender:
        _gender_section(single_gender, text, data)
    if quality is not None and quality.rows:
        _quality_section(quality, text, data)
    return Report("\n".join(text).rstrip("\n") + "\n", data)

