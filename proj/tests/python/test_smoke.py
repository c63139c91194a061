import json
import math
import os
from pathlib import Path

import pytest

import humor

DATA = Path(os.environ.get("HUMOR_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))


def test_clean_and_split():
    text = humor.clean_text("  “Why did the chicken cross the road?  To get to the other side.” ")
    assert text == "Why did the chicken cross the road? To get to the other side."
    parts = humor.split_setup_punchline(text)
    assert parts["rule"] == "question"
    assert parts["setup"] + parts["separator"] + parts["punchline"] == text


def test_tokenize_levels():
    assert humor.tokenize("Knock, knock!", lowercase=True) == ["knock", ",", "knock", "!"]
    assert humor.tokenize("Knock, knock!", drop_punct=True) == ["Knock", "knock"]
    assert humor.tokenize("ab", level="char") == ["a", "b"]


def test_empty_text_raises():
    with pytest.raises(humor.DataError):
        humor.clean_text("   ")


def test_score_token():
    assert humor.score_token("nsubj", 10000, 10000) == 0.0
    assert math.isclose(humor.score_token("nsubj", 3000, 10000), 12.5 * math.log10(7001), rel_tol=1e-12)
    with pytest.raises(humor.UsageError):
        humor.score_token("adverb", 1, 10)


def test_ngram_model(tmp_path):
    model = humor.NGramModel.fit(["a b a b", "b a c"], n=2)
    assert model.n == 2
    dist = model.next_distribution(["a"])
    assert math.isclose(sum(dist.values()), 1.0)
    assert dist["b"] == pytest.approx(2 / 3)
    assert model.generate(["a"], max_tokens=5, seed=3) == model.generate(["a"], max_tokens=5, seed=3)
    model.save(str(tmp_path / "m.json"))
    assert humor.NGramModel.load(str(tmp_path / "m.json")).next_distribution(["a"]) == dist
    with pytest.raises(humor.UsageError):
        humor.NGramModel.fit(["a b"], n=1)


def test_evaluation_report():
    r = humor.evaluation_report(8, 2, 1, 9)
    assert r["computer"]["precision"] == pytest.approx(8 / 9)
    assert r["human"]["recall"] == pytest.approx(0.9)
    assert r["accuracy"] == pytest.approx(17 / 20)
    assert humor.evaluation_report(0, 0, 0, 5)["computer"]["precision"] is None


def test_run_cli(tmp_path):
    code, out, err = humor.run_cli([])
    assert code == 1
    out_file = tmp_path / "jokes.jsonl"
    code, _, err = humor.run_cli(["ingest", "--in", str(DATA / "conllu" / "table5.jsonl"), "--out", str(out_file)])
    assert code == 0, err
    rows = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert len(rows) == 2
    assert rows[0]["split_rule"] == "question"
