import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from triplescore.distsup import LabeledTriple
from triplescore.features import FeatureVector
from triplescore.lexicon import UnknownEntityError
from triplescore.scorer import (
    InsufficientDataError,
    RegressionModel,
    ScoreFileError,
    check_training_data,
    combined_score,
    fit_ols,
    load_model,
    predict,
    round_score,
    save_model,
    score_file,
    score_triple,
)


def test_exact_linear_relation():
    x1 = np.linspace(0, 1, 11)
    X = np.column_stack([x1, np.zeros_like(x1)])
    m = fit_ols(X, 7 * x1)
    assert m.weights[0] == pytest.approx(7, abs=1e-6)
    assert m.weights[1] == pytest.approx(0, abs=1e-6)
    assert m.bias == pytest.approx(0, abs=1e-6)


def test_two_point_system():
    m = fit_ols([[0, 0], [1, 1]], [0, 7])
    assert predict(m, [0, 0]) == pytest.approx(0, abs=1e-6)
    assert predict(m, [1, 1]) == pytest.approx(7, abs=1e-6)
    # minimum-norm solution of the underdetermined system
    oracle = np.linalg.pinv(np.array([[1, 0, 0], [1, 1, 1]], dtype=float)) @ np.array([0.0, 7.0])
    assert [m.bias, *m.weights] == pytest.approx(oracle.tolist(), abs=1e-6)


def test_duplicated_rows_are_solvable():
    X = [[0.4, 0.2]] * 5
    m = fit_ols(X, [7] * 5)
    assert all(np.isfinite([m.bias, *m.weights]))
    A = np.column_stack([np.ones(5), np.array(X)])
    oracle = np.linalg.pinv(A) @ np.full(5, 7.0)
    assert [m.bias, *m.weights] == pytest.approx(oracle.tolist(), abs=1e-6)
    assert predict(m, [0.4, 0.2]) == pytest.approx(7.0, abs=1e-6)


def test_too_few_rows():
    with pytest.raises(InsufficientDataError):
        fit_ols([[1, 2]], [7])


def test_predict_clamps():
    assert predict(RegressionModel((0, 0), 3.2), FeatureVector(0.1, 0.9, 4)) == 3.2
    assert predict(RegressionModel((0, 0), 9.1), [0, 0]) == 7.0
    assert predict(RegressionModel((0, 0), -0.5), [0, 0]) == 0.0


def test_predict_permutation_invariant():
    m = RegressionModel((1.5, -2.0), 0.3)
    swapped = RegressionModel((-2.0, 1.5), 0.3, features=("tfidf", "w2v"))
    f = FeatureVector(w2v=0.8, tfidf=0.1, occ=0)
    assert predict(m, f) == predict(swapped, f)


@pytest.mark.parametrize("occ, lr, expected", [(7, 7, 7.0), (0, 7, 3.5), (6, 2, 4.0)])
def test_combined_score(occ, lr, expected):
    assert combined_score(occ, lr) == expected


@given(st.integers(0, 7), st.integers(0, 7), st.floats(0, 7), st.floats(0, 7))
def test_combined_monotone(o1, o2, l1, l2):
    lo_o, hi_o = sorted((o1, o2))
    lo_l, hi_l = sorted((l1, l2))
    assert combined_score(lo_o, lo_l) <= combined_score(hi_o, lo_l) <= combined_score(hi_o, hi_l)


@pytest.mark.parametrize("x, expected", [(3.5, 4), (2.5, 3), (2.49, 2), (0.5, 1), (-0.4, 0), (7.6, 7), (0.0, 0)])
def test_round_score(x, expected):
    assert round_score(x) == expected


def test_workflow_steps(model):
    assert score_triple("p21", "profession", "Writer", model) == 3
    assert score_triple("p02", "profession", "Film Director", model) == 7
    assert score_triple("p02", "profession", "Chemist", model) == 0
    s = score_triple("p01", "profession", "Actor", model)
    f = model.features("p01", "profession", "Actor")
    assert s == round_score(0.5 * f.occ + 0.5 * predict(model.regressions["profession"], f))
    with pytest.raises(UnknownEntityError):
        score_triple("p01", "profession", "Astronaut", model)


def test_negative_overrides_features(model):
    forced = type(model)(**{**model.__dict__, "regressions": {
        r: RegressionModel((0, 0), 7.0) for r in model.regressions}})
    assert score_triple("p02", "profession", "Chemist", forced) == 0


def test_training_labels_reproduced(trained):
    model, training = trained
    for triples in training.values():
        for t in triples:
            assert score_triple(t.person_id, t.relation, t.entity, model) == t.score


def test_scores_in_range(model, index, professions, nationalities):
    for lex in (professions, nationalities):
        for doc in index:
            for e in lex.entities:
                assert 0 <= score_triple(doc.person_id, lex.relation_type, e, model) <= 7


def test_check_training_data_names_counts():
    with pytest.raises(InsufficientDataError, match="0 positive / 1 negative"):
        check_training_data({"profession": [LabeledTriple("p", "profession", "Actor", 0)]})


def test_score_file(model, fixtures_dir, tmp_path):
    out = tmp_path / "scored.tsv"
    assert score_file(fixtures_dir / "triples.tsv", model, out) == []
    lines = out.read_text().splitlines()
    inputs = (fixtures_dir / "triples.tsv").read_text().splitlines()
    assert [line.rsplit("\t", 1)[0] for line in lines] == inputs
    assert "p21\tprofession\tWriter\t3" in lines
    assert "p01\tprofession\tChemist\t0" in lines
    again = tmp_path / "again.tsv"
    score_file(fixtures_dir / "triples.tsv", model, again, threads=3)
    assert again.read_bytes() == out.read_bytes()


def test_score_file_empty(model, tmp_path):
    (tmp_path / "in.tsv").write_text("")
    score_file(tmp_path / "in.tsv", model, tmp_path / "out.tsv")
    assert (tmp_path / "out.tsv").read_text() == ""


def test_score_file_bad_lines(model, tmp_path):
    (tmp_path / "in.tsv").write_text(
        "p01\tprofession\tActor\nbroken line\np01\tprofession\tAstronaut\np01\thobby\tChess\n")
    with pytest.raises(ScoreFileError) as err:
        score_file(tmp_path / "in.tsv", model, tmp_path / "out.tsv")
    assert [n for n, _ in err.value.problems] == [2, 3, 4]
    skipped = score_file(tmp_path / "in.tsv", model, tmp_path / "out.tsv", skip_bad=True)
    assert len(skipped) == 3
    assert (tmp_path / "out.tsv").read_text().count("\n") == 1


def test_bundle_round_trip(model, tmp_path, index, professions, nationalities):
    save_model(model, tmp_path / "m")
    loaded = load_model(tmp_path / "m")
    assert loaded.regressions == model.regressions
    assert loaded.profiles == model.profiles
    assert np.array_equal(loaded.embeddings.vectors, model.embeddings.vectors)
    for lex in (professions, nationalities):
        for doc in index:
            for e in lex.entities:
                assert score_triple(doc.person_id, lex.relation_type, e, loaded) == \
                    score_triple(doc.person_id, lex.relation_type, e, model)
    save_model(loaded, tmp_path / "m2")
    for f in sorted(p.relative_to(tmp_path / "m") for p in (tmp_path / "m").rglob("*") if p.is_file()):
        assert (tmp_path / "m" / f).read_bytes() == (tmp_path / "m2" / f).read_bytes()
    weights = (tmp_path / "m" / "profession" / "weights.tsv").read_text().splitlines()
    assert [w.split("\t")[0] for w in weights] == ["w2v", "tfidf", "bias"]
