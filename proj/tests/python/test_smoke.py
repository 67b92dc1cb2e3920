import json
import os
from pathlib import Path

import pytest

import lrtrace

ROOT = Path(os.environ.get("LRT_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="module")
def corpus():
    return lrtrace.Corpus.load(str(FIXTURES / "corpus.json"))


def test_corpus_shape(corpus):
    assert len(corpus.codes()) == 26
    assert len(corpus.requirement_ids()) == 10
    assert corpus.ground_truth()["KP-1"] == {"SEC"}


def test_errors_map_to_python_exceptions(corpus):
    with pytest.raises(lrtrace.ReferenceError):
        corpus.requirement_text("NOPE")
    assert issubclass(lrtrace.ReferenceError, lrtrace.ValidationError)
    assert issubclass(lrtrace.AuthError, lrtrace.TransportError)
    with pytest.raises(lrtrace.ParseError):
        lrtrace.Corpus.parse("{not json")


def test_metrics():
    assert lrtrace.f_beta(0, 1, 57) is None
    assert lrtrace.f_beta(28, 2, 10) == lrtrace.f_beta(20, 2, 7)
    assert lrtrace.fisher_exact(3, 1, 1, 3) == pytest.approx(0.4857142857)
    assert lrtrace.roc_auc([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0]) == pytest.approx(0.75)


def test_delta_and_constant():
    m = lrtrace.SimilarityMatrix.load(str(FIXTURES / "delta_matrix.json"))
    assert lrtrace.predict_delta(m)["R1"] == {"c1", "c4"}
    rows = m.rows()
    assert len(rows) == len(m.req_ids)
    built = lrtrace.SimilarityMatrix(m.req_ids, m.codes, rows)
    assert lrtrace.predict_constant(built, 0.0) == lrtrace.predict_constant(m, 0.0)
    with pytest.raises(lrtrace.DimensionError):
        lrtrace.SimilarityMatrix(["a"], ["x", "y"], [[0.1]])


def test_similarity_tuning_and_evaluation(corpus):
    m = lrtrace.similarity(corpus, dim=64)
    assert len(m.req_ids) == 10
    assert len(m.codes) == 26
    theta, f2, points = lrtrace.tune_threshold(m, corpus)
    assert len(points) == 99
    assert 0.0 < theta < 1.0
    assert f2 == max(p[1] for p in points)
    report = lrtrace.evaluate(corpus, corpus.ground_truth(), scores=m)
    assert json.dumps(report)
    assert 0.0 <= lrtrace.map_score(m, corpus) <= 1.0


def test_hash_embed_is_deterministic():
    a = lrtrace.hash_embed("data shall be encrypted", 32, 16)
    b = lrtrace.hash_embed("data shall be encrypted", 32, 16)
    assert a == b
    assert lrtrace.cosine(a, b) == pytest.approx(1.0)


def test_prompts_and_parser(corpus):
    text = lrtrace.render_prompt(corpus, "rice", "KP-1", examples=str(FIXTURES / "examples.json"))
    assert text == (ROOT / "tests" / "golden" / "rice.txt").read_text()
    for variant in ("p1", "p3_2"):
        pair = lrtrace.render_prompt(corpus, variant, "KP-1", code="SEC")
        assert pair == (ROOT / "tests" / "golden" / f"{variant}.txt").read_text()
    codes, rationale, sentinel = lrtrace.parse_code_list("[ACC, SEC]\nRationale: both apply", corpus.codes())
    assert codes == {"ACC", "SEC"}
    assert rationale == "both apply"
    assert not sentinel


def test_loo_and_cli(corpus, tmp_path):
    result = lrtrace.run_loo(corpus, methods=["constant", "delta"], dim=64)
    assert json.dumps(result)
    code, out, err = lrtrace.run_cli(["fisher", "3", "1", "1", "3", "--out-dir", str(tmp_path)])
    assert code == 0, err
    assert json.loads((tmp_path / "fisher.json").read_text())["p_value"] == pytest.approx(0.4857142857)
    assert lrtrace.run_cli(["frobnicate"])[0] == 2
