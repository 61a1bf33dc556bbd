"""Command-line interface: exit codes and JSON summaries."""

import json

import pytest
from mvseq import read_corpus

from mvseq_export.cli import main


def test_docs_command_happy_path(tmp_path, tiny_checkpoint, beir_dir, capsys):
    out = tmp_path / "docs"
    code = main([
        "docs", "--model", tiny_checkpoint, "--dataset", str(beir_dir),
        "--out", str(out), "--max-length", "16", "--batch-size", "2",
    ])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["docs"] == 4
    assert summary["dim"] == 16
    assert read_corpus(out).manifest.has_attention is True


def test_queries_command_happy_path(tmp_path, tiny_checkpoint, beir_dir, capsys):
    out = tmp_path / "queries"
    code = main([
        "queries", "--model", tiny_checkpoint, "--dataset", str(beir_dir),
        "--out", str(out), "--max-length", "8",
    ])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["queries"] == 3
    assert summary["qrels_lines"] == 4
    assert read_corpus(out).manifest.has_attention is False


def test_jsonl_input(tmp_path, tiny_checkpoint, capsys):
    src = tmp_path / "in.jsonl"
    src.write_text('{"_id": "a", "text": "ab cd"}\n')
    code = main([
        "docs", "--model", tiny_checkpoint, "--jsonl", str(src),
        "--out", str(tmp_path / "docs"),
    ])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["docs"] == 1


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["docs", "--model", "m", "--out", "o"]) == 1  # no input source
    err = capsys.readouterr().err
    assert "mvseq-export:" in err


def test_dataset_and_jsonl_are_mutually_exclusive(tmp_path, capsys):
    code = main([
        "docs", "--model", "m", "--dataset", "d", "--jsonl", "x",
        "--out", str(tmp_path / "o"),
    ])
    assert code == 1


def test_missing_dataset_exits_2(tmp_path, tiny_checkpoint, capsys):
    code = main([
        "docs", "--model", tiny_checkpoint, "--dataset", str(tmp_path / "nope"),
        "--out", str(tmp_path / "docs"),
    ])
    assert code == 2
    assert "not found" in capsys.readouterr().err


def test_bad_max_length_exits_2(tmp_path, tiny_checkpoint, capsys):
    src = tmp_path / "in.jsonl"
    src.write_text('{"_id": "a", "text": "ab"}\n')
    code = main([
        "docs", "--model", tiny_checkpoint, "--jsonl", str(src),
        "--out", str(tmp_path / "docs"), "--max-length", "1",
    ])
    assert code == 2
    assert "doc_max_length must be >= 2" in capsys.readouterr().err


def test_empty_query_exits_2(tmp_path, tiny_checkpoint, capsys):
    src = tmp_path / "q.jsonl"
    src.write_text('{"_id": "q9", "text": ""}\n')
    code = main([
        "queries", "--model", tiny_checkpoint, "--jsonl", str(src),
        "--out", str(tmp_path / "queries"),
    ])
    assert code == 2
    assert "q9" in capsys.readouterr().err
