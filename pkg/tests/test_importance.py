"""Importance scoring: IDF table, attention passthrough, seeded random."""

import math

import numpy as np
import pytest

from mvseq import (
    DocumentRecord,
    IdfTable,
    build_idf_table,
    read_corpus,
    score_tokens,
    top_positions,
    write_corpus,
)
from mvseq.importance import ImportanceScores


def two_doc_corpus(tmp_path):
    # token 5 in both docs, token 7 in one, token 9 in none
    docs = [
        DocumentRecord("d1", np.ones((3, 2), dtype=np.float32),
                       token_ids=np.array([101, 5, 7], dtype=np.uint32)),
        DocumentRecord("d2", np.ones((3, 2), dtype=np.float32),
                       token_ids=np.array([102, 5, 8], dtype=np.uint32)),
    ]
    write_corpus(docs, tmp_path / "c")
    return read_corpus(tmp_path / "c")


def test_idf_worked_values(tmp_path):
    table = build_idf_table(two_doc_corpus(tmp_path))
    assert table.doc_count == 2
    assert table.idf(5) == pytest.approx(0.0, abs=1e-12)
    assert table.idf(7) == pytest.approx(math.log(3 / 2), abs=1e-12)
    assert table.idf(9) == pytest.approx(math.log(3), abs=1e-12)  # df=0 path
    assert table.idf(7) == pytest.approx(0.405465, abs=1e-6)
    assert table.idf(9) == pytest.approx(1.098612, abs=1e-6)


def test_df_counts_each_doc_once(tmp_path):
    docs = [
        DocumentRecord("d1", np.ones((4, 2), dtype=np.float32),
                       token_ids=np.array([1, 5, 5, 5], dtype=np.uint32)),
    ]
    write_corpus(docs, tmp_path / "c")
    table = build_idf_table(read_corpus(tmp_path / "c"))
    assert table.df[5] == 1


def test_build_idf_requires_token_ids(tmp_path):
    write_corpus([DocumentRecord("d1", np.ones((2, 2), dtype=np.float32))],
                 tmp_path / "c")
    with pytest.raises(ValueError, match="lacks token ids"):
        build_idf_table(read_corpus(tmp_path / "c"))


def test_idf_table_json_roundtrip(tmp_path):
    table = IdfTable(doc_count=10, df={3: 4, 9: 1})
    path = tmp_path / "idf.json"
    table.save(path)
    loaded = IdfTable.load(path)
    assert loaded == table
    assert loaded.idf(3) == pytest.approx(math.log(11 / 5))


def test_idf_scoring_matches_table_lookup(tmp_path):
    table = build_idf_table(two_doc_corpus(tmp_path))
    doc = DocumentRecord("d1", np.ones((3, 2), dtype=np.float32),
                         token_ids=np.array([101, 5, 7], dtype=np.uint32))
    scores = score_tokens(doc, "idf", idf=table)
    assert scores.scores == pytest.approx([0.0, 0.405465], abs=1e-6)


def test_idf_scores_ignore_embedding_values(tmp_path):
    table = build_idf_table(two_doc_corpus(tmp_path))
    tok = np.array([101, 5, 7], dtype=np.uint32)
    a = DocumentRecord("d1", np.ones((3, 2), dtype=np.float32), token_ids=tok)
    b = DocumentRecord("d1", np.full((3, 2), 9.0, dtype=np.float32), token_ids=tok)
    assert np.array_equal(score_tokens(a, "idf", idf=table).scores,
                          score_tokens(b, "idf", idf=table).scores)


def test_attention_scores_copied_verbatim():
    doc = DocumentRecord("d1", np.ones((4, 2), dtype=np.float32),
                         attention=np.array([0.0, 3.0, 1.0, 2.0], dtype=np.float32))
    scores = score_tokens(doc, "attention")
    assert scores.scores.tolist() == [3.0, 1.0, 2.0]


def test_attention_scoring_is_permutation_equivariant():
    gen = np.random.default_rng(31)
    emb = gen.standard_normal((6, 3)).astype(np.float32)
    att = gen.random(6).astype(np.float32)
    doc = DocumentRecord("d1", emb, attention=att)
    base = score_tokens(doc, "attention").scores

    perm = np.array([0, 3, 1, 5, 2, 4])  # keeps the protected row in place
    doc_p = DocumentRecord("d1", emb[perm], attention=att[perm])
    permuted = score_tokens(doc_p, "attention").scores
    assert np.array_equal(permuted, base[perm[1:] - 1])


def test_random_scores_deterministic_per_key():
    doc = DocumentRecord("d1", np.ones((5, 2), dtype=np.float32))
    a = score_tokens(doc, "random", seed=7).scores
    b = score_tokens(doc, "random", seed=7).scores
    assert np.array_equal(a, b)
    assert not np.array_equal(a, score_tokens(doc, "random", seed=8).scores)
    other = DocumentRecord("d2", np.ones((5, 2), dtype=np.float32))
    assert not np.array_equal(a, score_tokens(other, "random", seed=7).scores)
    assert np.all((a >= 0.0) & (a < 1.0))


def test_random_scores_ignore_embeddings():
    a = DocumentRecord("d1", np.ones((5, 2), dtype=np.float32))
    b = DocumentRecord("d1", np.zeros((5, 2), dtype=np.float32))
    assert np.array_equal(score_tokens(a, "random", seed=3).scores,
                          score_tokens(b, "random", seed=3).scores)


def test_scoring_errors():
    doc = DocumentRecord("d1", np.ones((3, 2), dtype=np.float32))
    with pytest.raises(ValueError, match="unknown scoring method"):
        score_tokens(doc, "entropy")
    with pytest.raises(ValueError, match="no attention field"):
        score_tokens(doc, "attention")
    with pytest.raises(ValueError, match="requires an IdfTable"):
        score_tokens(doc, "idf")
    with pytest.raises(ValueError, match="no token ids"):
        score_tokens(doc, "idf", idf=IdfTable(doc_count=1, df={}))


def test_top_positions_selection_and_ties():
    s = ImportanceScores("d", np.array([0.9, 0.1, 0.5]))
    assert top_positions(s, 1) == [1]
    assert top_positions(s, 2) == [1, 3]
    assert top_positions(s, 3) == [1, 2, 3]
    assert top_positions(s, 99) == [1, 2, 3]
    assert top_positions(s, 0) == []

    tied = ImportanceScores("d", np.array([0.5, 0.5, 0.1]))
    assert top_positions(tied, 1) == [1]  # tie -> lower position
    assert top_positions(tied, 2) == [1, 2]


def test_top_positions_returns_ascending_order():
    s = ImportanceScores("d", np.array([0.1, 0.9, 0.2, 0.8]))
    assert top_positions(s, 2) == [2, 4]
