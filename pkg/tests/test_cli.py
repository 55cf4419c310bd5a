import csv
import io
import json
import random
import subprocess
import sys

import pytest

from oovcover.benchmark import SHEET_COLUMNS, categories_for
from oovcover.cli import main
from oovcover.corpus import load_table
from oovcover.coverage import Status, classify_word


def run(*argv):
    return main([str(a) for a in argv])


def write_corpus(path, lines):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(ln + "\n" for ln in lines), encoding="utf-8")


@pytest.fixture
def corpora(tmp_path):
    rng = random.Random(21)
    base = "abcdefgh"
    train_vocab = ["".join(rng.choice(base) for _ in range(rng.randint(2, 6))) for _ in range(150)]
    # the target adds letters never seen in training
    target_vocab = train_vocab[:60] + ["".join(rng.choice(base + "xyz") for _ in range(rng.randint(2, 7)))
                                       for _ in range(300)]
    write_corpus(tmp_path / "train" / "t.txt",
                 [" ".join(rng.choices(train_vocab, k=rng.randint(3, 10))) for _ in range(500)])
    write_corpus(tmp_path / "target" / "g.txt",
                 [" ".join(rng.choices(target_vocab, k=rng.randint(3, 10))) for _ in range(500)])
    assert run("ingest", tmp_path / "train", "--out", tmp_path / "train.tsv") == 0
    assert run("ingest", tmp_path / "target", "--out", tmp_path / "target.tsv") == 0
    return tmp_path


def test_select_echoes_config(corpora, capsys):
    out = corpora / "sel"
    rc = run("select", "--training", corpora / "train.tsv", "--target", corpora / "target.tsv",
             "--k", 6, "--budget", 2000, "--min-freq", 1, "--out", out)
    assert rc == 0
    doc = json.loads((out / "selection.json").read_text(encoding="utf-8"))
    assert doc["config"]["k"] == 6 and doc["config"]["budget"] == 2000
    assert doc["meta"]["config"]["k"] == 6 and doc["meta"]["config"]["budget"] == 2000
    assert doc["meta"]["tool"] == "oovcover"
    words = (out / "words.txt").read_text(encoding="utf-8").split()
    assert words == [c["word"] for c in doc["chosen"]] and words


def test_ingest_empty_dir_warns(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    rc = run("ingest", tmp_path / "empty", "--out", tmp_path / "t.tsv")
    assert rc == 0
    assert "WARNING" in capsys.readouterr().err
    assert load_table(tmp_path / "t.tsv").is_empty()


def test_usage_errors_exit_2(capsys):
    for argv in (["frobnicate"], ["select", "--bogus"], []):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 2


def test_io_failure_exit_1(tmp_path, capsys):
    missing = tmp_path / "nope.tsv"
    rc = run("coverage", "--training", missing, "--target", missing, "--out", tmp_path / "o")
    assert rc == 1
    err = capsys.readouterr().err.strip().splitlines()
    payload = json.loads(err[-1])
    assert payload["path"] == str(missing) and payload["error"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "oovcover", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "oovcover" in proc.stdout


def annotate(sheet_text, training, per_cat=3):
    """Accept the first OOV candidates per category and add IV rows by hand."""
    rows = list(csv.DictReader(io.StringIO(sheet_text), delimiter="\t"))
    cats = [c.value for c in categories_for("hi")]
    out = io.StringIO()
    w = csv.DictWriter(out, SHEET_COLUMNS, delimiter="\t", lineterminator="\n")
    w.writeheader()
    i = 0
    for row in rows:
        if i < per_cat * len(cats):
            row["category"], row["accept"] = cats[i // per_cat], "yes"
            i += 1
        w.writerow(row)
    iv_words = sorted(training.word_counts)[:per_cat * len(cats)]
    for j, word in enumerate(iv_words):
        assert classify_word(word, training).status is Status.IV
        w.writerow({"word": word, "status": "IV", "missing_bigrams": "[]", "target_frequency": 0,
                    "category": cats[j // per_cat], "accept": "yes", "notes": "", "sentence": f"say {word} now"})
    return out.getvalue()


def pipeline(root, out):
    """Run every stage; returns the paths of the produced artifacts."""
    tr, tg = root / "train.tsv", root / "target.tsv"
    common = ["--lang", "hi", "--min-freq", 2, "--seed", 7]
    assert run("coverage", "--training", tr, "--target", tg, "--vowels", "en", "--out", out / "cov", *common) == 0
    assert run("bench-export", "--candidates", out / "cov" / "candidates.jsonl", "--out", out / "sheet.tsv") == 0
    training = load_table(tr)
    sheet = annotate((out / "sheet.tsv").read_text(encoding="utf-8"), training)
    (out / "sheet_done.tsv").write_text(sheet, encoding="utf-8")
    assert run("bench-import", "--sheet", out / "sheet_done.tsv", "--training", tr, "--targets", 3,
               "--out", out / "entries.json", *common) == 0
    assert run("gap", "--entries", out / "entries.json", "--report", out / "cov" / "report.json",
               "--out", out / "gap.tsv", *common) == 0
    assert run("bench-build", "--entries", out / "entries.json", "--targets", 3,
               "--out", out / "bench.json", *common) == 0
    assert run("select", "--candidates", out / "cov" / "candidates.jsonl", "--report", out / "cov" / "report.json",
               "--exclude", out / "bench.json", "--budget", 40, "--out", out / "sel", *common) == 0
    assert run("script", "--words", out / "sel" / "words.txt", "--benchmark", out / "bench.json",
               "--training", tr, "--out", out / "script", *common) == 0
    return [out / "cov" / "report.json", out / "cov" / "report.tsv", out / "cov" / "candidates.jsonl",
            out / "cov" / "coverage.json", out / "sheet.tsv", out / "entries.json", out / "gap.tsv",
            out / "bench.json", out / "sel" / "selection.json", out / "sel" / "words.txt",
            out / "script" / "script.txt", out / "script" / "script.json", out / "script" / "validation.json"]


def test_full_pipeline(corpora):
    artifacts = pipeline(corpora, corpora / "run")
    bench = json.loads((corpora / "run" / "bench.json").read_text(encoding="utf-8"))
    assert bench["header"]["complete"] is True
    assert bench["header"]["n_entries"] == 7 * 6
    training = load_table(corpora / "train.tsv")
    for e in bench["entries"]:
        assert classify_word(e["word"], training).status.value == e["status"]
    validation = json.loads((corpora / "run" / "script" / "validation.json").read_text(encoding="utf-8"))
    assert validation["passed"] is True and validation["overlaps"] == []
    words = (corpora / "run" / "sel" / "words.txt").read_text(encoding="utf-8").split()
    script_words = (corpora / "run" / "script" / "script.txt").read_text(encoding="utf-8").replace(",", " ").split()
    assert sorted(words) == sorted(script_words)
    assert not set(words) & {e["word"] for e in bench["entries"]}
    cov = json.loads((corpora / "run" / "cov" / "coverage.json").read_text(encoding="utf-8"))
    assert cov["meta"]["config"]["min_frequency"] == 2 and "consecutive_vowels" in cov
    assert all(p.exists() for p in artifacts)


def test_pipeline_rerun_is_byte_identical(corpora):
    first = pipeline(corpora, corpora / "run")
    snapshot = {p: p.read_bytes() for p in first}
    second = pipeline(corpora, corpora / "run")
    assert {p: p.read_bytes() for p in second} == snapshot


def test_script_overlap_fails(corpora, tmp_path, capsys):
    words = tmp_path / "w.txt"
    words.write_text("abc\nzzz\n", encoding="utf-8")
    bench = tmp_path / "b.txt"
    bench.write_text("zzz\n", encoding="utf-8")
    rc = run("script", "--words", words, "--benchmark", bench, "--training", corpora / "train.tsv",
             "--out", tmp_path / "s")
    assert rc == 1
    assert "zzz" in capsys.readouterr().err


def test_eval_and_report(tmp_path, fixtures_dir, capsys):
    assert run("eval", "--rates", fixtures_dir / "table2_rates.csv", "--out", tmp_path / "eval.json") == 0
    assert run("report", "--eval", tmp_path / "eval.json", "--out", tmp_path / "report.json") == 0
    text = capsys.readouterr().out
    assert "40.35" in text and "Tamil" in text
    data = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert len(data["ier"]) == 16


def test_eval_from_ratings(tmp_path):
    from oovcover.evaluation import RatingRecord, write_ratings
    recs = []
    n = 0
    for cond in ("I", "I+O", "I+M1M2", "I+F1"):
        for cat in categories_for("hi"):
            for voice in ("Male", "Female"):
                for i in range(10):
                    n += 1
                    recs.append(RatingRecord.from_row({
                        "sample_id": f"s{n}", "language": "hi", "system": "FP", "train_condition": cond,
                        "test_condition": "OOV", "voice": voice, "category": cat.value, "word": f"w{i}",
                        "rater_id": "r1", "intelligible": "0" if i < 2 else "1"}))
    (tmp_path / "r.csv").write_text(write_ratings(recs), encoding="utf-8")
    assert run("eval", "--ratings", tmp_path / "r.csv", "--out", tmp_path / "e.json") == 0
    doc = json.loads((tmp_path / "e.json").read_text(encoding="utf-8"))
    assert all(c["rate"] == pytest.approx(0.2) for c in doc["ier"]["cells"])
    assert all(r["rate"] == pytest.approx(0.2) for r in doc["single_gender"])
