import hashlib
import json
import shutil
import subprocess
import sys
from dataclasses import replace

import pytest

from rap.cli import main
from rap.dataset import load_augmented, load_dataset, write_dataset
from rap.store import read_store
from tests.conftest import DATA, SHIPS_SENTENCE
from tests.eval_fixtures import trigger_pair


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture
def work(tmp_path):
    for name in ("schema.jsonl", "train.jsonl", "lexicon.jsonl", "corpus.txt"):
        shutil.copy(DATA / name, tmp_path / name)
    return tmp_path


@pytest.fixture
def built(work, capsys):
    code, _, _ = run(capsys, "build", "--schema", work / "schema.jsonl", "--dataset", work / "train.jsonl",
                     "--store", work / "store.jsonl")
    assert code == 0
    return work


def test_build(built):
    assert (built / "store.jsonl").exists()
    assert (built / "store.jsonl.index.json").exists()
    assert len(read_store(built / "store.jsonl")) == 50


def test_build_missing_schema(work, capsys):
    missing = work / "nope.jsonl"
    code, _, err = run(capsys, "build", "--schema", missing, "--dataset", work / "train.jsonl",
                       "--store", work / "store.jsonl")
    assert code == 1
    assert str(missing) in err
    assert not (work / "store.jsonl").exists()


def test_build_unknown_label(work, capsys):
    bad = work / "bad.jsonl"
    bad.write_text(json.dumps({"id": 0, "text": "they flew", "events": [
        {"type": "Teleport", "trigger": {"text": "flew", "start": 5, "end": 9}, "arguments": []}]}) + "\n")
    code, _, err = run(capsys, "build", "--schema", work / "schema.jsonl", "--dataset", bad,
                       "--store", work / "store.jsonl")
    assert code == 1
    assert "Teleport" in err


def test_annotate_ships_sentence(built, capsys):
    corpus = built / "one.txt"
    corpus.write_text(SHIPS_SENTENCE + "\n")
    code, out, _ = run(capsys, "annotate", "--schema", built / "schema.jsonl", "--store", built / "store.jsonl",
                       "--corpus", corpus, "--lexicon", built / "lexicon.jsonl")
    assert code == 0
    store = read_store(built / "store.jsonl")
    assert len(store) == 51
    last = store[50]
    assert last.source == "weak" and last.text == SHIPS_SENTENCE
    assert set(last.labels) == {"Transport", "Convict"}
    assert json.loads(out)["stats"]["by_source"] == {"gold": 50, "weak": 1}


def test_annotate_empty_corpus(built, capsys):
    corpus = built / "empty.txt"
    corpus.write_text("")
    before = digest(built / "store.jsonl")
    code, _, _ = run(capsys, "annotate", "--schema", built / "schema.jsonl", "--store", built / "store.jsonl",
                     "--corpus", corpus, "--lexicon", built / "lexicon.jsonl")
    assert code == 0
    assert digest(built / "store.jsonl") == before


def test_annotate_unreadable_lexicon(built, capsys):
    code, _, err = run(capsys, "annotate", "--schema", built / "schema.jsonl", "--store", built / "store.jsonl",
                       "--corpus", built / "corpus.txt", "--lexicon", built / "missing.jsonl")
    assert code == 1 and "missing.jsonl" in err


def test_annotate_out_leaves_store(built, capsys):
    before = digest(built / "store.jsonl")
    code, _, _ = run(capsys, "annotate", "--schema", built / "schema.jsonl", "--store", built / "store.jsonl",
                     "--corpus", built / "corpus.txt", "--lexicon", built / "lexicon.jsonl", "--out", built / "s2.jsonl")
    assert code == 0
    assert digest(built / "store.jsonl") == before
    assert len(read_store(built / "s2.jsonl")) > 50


def augment(capsys, d, out, *extra):
    return run(capsys, "augment", "--schema", d / "schema.jsonl", "--store", d / "store.jsonl",
               "--dataset", d / "train.jsonl", "--out", out, *extra)


def test_augment_deterministic(built, capsys):
    assert augment(capsys, built, built / "a1.jsonl", "--seed", 7)[0] == 0
    assert augment(capsys, built, built / "a2.jsonl", "--seed", 7)[0] == 0
    assert (built / "a1.jsonl").read_bytes() == (built / "a2.jsonl").read_bytes()


def test_augment_k_zero(built, capsys):
    code, _, err = augment(capsys, built, built / "a.jsonl", "--k", 0)
    assert code == 1 and "k" in err
    assert not (built / "a.jsonl").exists()


def test_augment_hundred_records(built, capsys):
    base = load_dataset(built / "train.jsonl", "event")
    hundred = [replace(r, id=i) for i, r in enumerate(base + base)]
    write_dataset(hundred, built / "train.jsonl")
    code, out, _ = augment(capsys, built, built / "a.jsonl", "--k", 3)
    assert code == 0
    rows = load_augmented(built / "a.jsonl")
    assert len(rows) == 100
    assert all(len(r.retrieved_ids) <= 3 for r in rows)
    assert json.loads(out)["records"] == 100


def test_augment_self_exclusion(built, capsys):
    assert augment(capsys, built, built / "a.jsonl", "--k", 8)[0] == 0
    store = read_store(built / "store.jsonl")
    for row in load_augmented(built / "a.jsonl"):
        assert all(store[i].origin_record != row.id for i in row.retrieved_ids)
        assert len(row.prompt_mask) == len(row.input.split())


def test_augment_schema_mismatch(built, capsys):
    other = built / "other.jsonl"
    other.write_text((built / "schema.jsonl").read_text() + json.dumps(
        {"node": "Extra", "kind": "event_type", "definition": None}) + "\n")
    code, _, err = run(capsys, "augment", "--schema", other, "--store", built / "store.jsonl",
                       "--dataset", built / "train.jsonl", "--out", built / "a.jsonl")
    assert code == 1 and "different schema" in err


def test_config_file_and_override(built, capsys):
    cfg = built / "cfg.json"
    cfg.write_text(json.dumps({"schema": str(built / "schema.jsonl"), "store": str(built / "store.jsonl"),
                               "dataset": str(built / "train.jsonl"), "k": 1}))
    code, out, _ = run(capsys, "augment", "--config", cfg, "--out", built / "a.jsonl")
    assert code == 0 and json.loads(out)["k"] == 1
    code, out, _ = run(capsys, "augment", "--config", cfg, "--out", built / "b.jsonl", "--k", 4)
    assert code == 0 and json.loads(out)["k"] == 4
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "stats", "--config", cfg)[0] == 1


def test_focus_default_k(built, capsys):
    _, out, _ = augment(capsys, built, built / "a.jsonl", "--focus", "argument")
    assert json.loads(out)["k"] == 8
    _, out, _ = augment(capsys, built, built / "b.jsonl")
    assert json.loads(out)["k"] == 2


def write_pair(d, gold, pred):
    write_dataset(gold, d / "gold.jsonl")
    write_dataset(pred, d / "pred.jsonl")


def test_eval_identity(tmp_path, capsys):
    gold, _ = trigger_pair()
    write_pair(tmp_path, gold, gold)
    code, out, _ = run(capsys, "eval", "--gold", tmp_path / "gold.jsonl", "--pred", tmp_path / "pred.jsonl")
    assert code == 0
    assert json.loads(out)["trigger"]["f1"] == 1.0


def test_eval_fixture(tmp_path, capsys):
    write_pair(tmp_path, *trigger_pair())
    code, out, _ = run(capsys, "eval", "--gold", tmp_path / "gold.jsonl", "--pred", tmp_path / "pred.jsonl")
    rep = json.loads(out)["trigger"]
    assert code == 0
    assert (rep["precision"], rep["recall"]) == (0.5, 1 / 3)
    assert abs(rep["f1"] - 0.4) < 1e-15


def test_eval_misaligned(tmp_path, capsys):
    gold, pred = trigger_pair()
    write_pair(tmp_path, gold, pred[:1])
    code, _, err = run(capsys, "eval", "--gold", tmp_path / "gold.jsonl", "--pred", tmp_path / "pred.jsonl")
    assert code == 1 and "differ" in err


def test_split_and_stats(built, capsys):
    code, out, _ = run(capsys, "split", "--dataset", built / "train.jsonl", "--fraction", 0.1, "--seed", 3,
                       "--out", built / "s.jsonl")
    assert code == 0 and json.loads(out)["selected"] == 5
    assert len(load_dataset(built / "s.jsonl", "event")) == 5
    code, out, _ = run(capsys, "stats", "--store", built / "store.jsonl")
    stats = json.loads(out)
    assert code == 0 and stats["entries"] == 50


def test_inputs_not_mutated(built, capsys):
    names = ("schema.jsonl", "train.jsonl", "lexicon.jsonl", "corpus.txt")
    before = {n: digest(built / n) for n in names}
    augment(capsys, built, built / "a.jsonl")
    run(capsys, "annotate", "--schema", built / "schema.jsonl", "--store", built / "store.jsonl",
        "--corpus", built / "corpus.txt", "--lexicon", built / "lexicon.jsonl", "--out", built / "x.jsonl")
    run(capsys, "split", "--dataset", built / "train.jsonl", "--fraction", 0.2, "--out", built / "s.jsonl")
    assert {n: digest(built / n) for n in names} == before


def test_json_logs(built):
    proc = subprocess.run(
        [sys.executable, "-m", "rap", "stats", "--store", str(built / "store.jsonl")],
        capture_output=True, text=True, env={"RAP_LOG": "DEBUG", "PATH": ""},
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["entries"] == 50
    proc = subprocess.run(
        [sys.executable, "-m", "rap", "build", "--schema", str(built / "schema.jsonl"),
         "--dataset", str(built / "train.jsonl"), "--store", str(built / "s3.jsonl")],
        capture_output=True, text=True,
    )
    lines = [json.loads(line) for line in proc.stderr.splitlines()]
    assert any(line.get("msg") == "store built" and line.get("entries") == 50 for line in lines)
