"""Input readers: JSONL, BEIR layout, qrels conversion."""

import json

import pytest
from mvseq.metrics import load_qrels

from mvseq_export import (
    convert_beir_qrels,
    iter_beir_corpus,
    iter_beir_queries,
    iter_jsonl_texts,
    read_beir_qrels,
    write_trec_qrels,
)


def test_jsonl_ids_and_title_join(tmp_path):
    path = tmp_path / "in.jsonl"
    rows = [
        {"_id": "a", "title": "Heads", "text": "tails"},
        {"_id": "b", "text": "no title"},
        {"_id": "c", "title": "only title", "text": ""},
    ]
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    got = list(iter_jsonl_texts([path]))
    assert got == [("a", "Heads tails"), ("b", "no title"), ("c", "only title")]


def test_jsonl_skips_blank_lines_and_accepts_id_key(tmp_path):
    path = tmp_path / "in.jsonl"
    path.write_text('{"id": 7, "text": "x"}\n\n\n{"_id": "y", "text": "z"}\n')
    got = list(iter_jsonl_texts([path]))
    assert got == [("7", "x"), ("y", "z")]


def test_jsonl_multiple_files_in_order(tmp_path):
    p1, p2 = tmp_path / "1.jsonl", tmp_path / "2.jsonl"
    p1.write_text('{"_id": "a", "text": "1"}\n')
    p2.write_text('{"_id": "b", "text": "2"}\n')
    assert [i for i, _ in iter_jsonl_texts([p1, p2])] == ["a", "b"]


def test_jsonl_missing_id_field(tmp_path):
    path = tmp_path / "in.jsonl"
    path.write_text('{"text": "x"}\n')
    with pytest.raises(ValueError, match=r"in\.jsonl:1: missing '_id'"):
        list(iter_jsonl_texts([path]))


def test_jsonl_missing_text_field(tmp_path):
    path = tmp_path / "in.jsonl"
    path.write_text('{"_id": "a", "text": "ok"}\n{"_id": "b"}\n')
    with pytest.raises(ValueError, match=r"in\.jsonl:2: missing 'text'"):
        list(iter_jsonl_texts([path]))


def test_jsonl_invalid_json(tmp_path):
    path = tmp_path / "in.jsonl"
    path.write_text("{not json\n")
    with pytest.raises(ValueError, match=r"in\.jsonl:1: invalid JSON"):
        list(iter_jsonl_texts([path]))


def test_beir_corpus_and_queries(beir_dir):
    docs = list(iter_beir_corpus(beir_dir))
    assert [d for d, _ in docs] == ["d1", "d2", "d3", "d4"]
    assert docs[0][1] == "abc def ga hb ic"  # title prepended
    assert docs[3][1] == "jj ab"
    queries = list(iter_beir_queries(beir_dir))
    assert [q for q, _ in queries] == ["q1", "q2", "q3"]


def test_beir_missing_directory(tmp_path):
    with pytest.raises(FileNotFoundError, match="corpus.jsonl.*not found"):
        list(iter_beir_corpus(tmp_path / "nope"))


def test_qrels_read_skips_header(beir_dir):
    triples = read_beir_qrels(beir_dir, "test")
    assert triples == [("q1", "d1", 1), ("q2", "d2", 2), ("q2", "d3", 0), ("q3", "d3", 1)]


def test_qrels_headerless_file_accepted(tmp_path):
    (tmp_path / "qrels").mkdir()
    (tmp_path / "qrels" / "dev.tsv").write_text("q1\td1\t1\nq1\td2\t0\n")
    assert read_beir_qrels(tmp_path, "dev") == [("q1", "d1", 1), ("q1", "d2", 0)]


def test_qrels_bad_field_count(tmp_path):
    (tmp_path / "qrels").mkdir()
    (tmp_path / "qrels" / "test.tsv").write_text("q1\td1\n")
    with pytest.raises(ValueError, match="expected 3 tab-separated fields, got 2"):
        read_beir_qrels(tmp_path, "test")


def test_qrels_bad_grade(tmp_path):
    (tmp_path / "qrels").mkdir()
    (tmp_path / "qrels" / "test.tsv").write_text("q1\td1\t1\nq2\td2\thigh\n")
    with pytest.raises(ValueError, match=r"test\.tsv:2: bad grade 'high'"):
        read_beir_qrels(tmp_path, "test")


def test_write_trec_qrels_format(tmp_path):
    out = tmp_path / "qrels.txt"
    write_trec_qrels([("q1", "d1", 2), ("q2", "d9", 0)], out)
    assert out.read_text() == "q1 0 d1 2\nq2 0 d9 0\n"


def test_converted_qrels_parse_with_the_retrieval_pipeline(beir_dir, tmp_path):
    out = tmp_path / "qrels.txt"
    count = convert_beir_qrels(beir_dir, out, "test")
    assert count == 4
    qrels = load_qrels(out)
    assert qrels == {"q1": {"d1": 1}, "q2": {"d2": 2, "d3": 0}, "q3": {"d3": 1}}
