"""Input readers: JSONL text collections, BEIR-layout directories, qrels.

A BEIR-layout directory contains::

    corpus.jsonl     {"_id": ..., "title": ..., "text": ...} per line
    queries.jsonl    {"_id": ..., "text": ...} per line
    qrels/<split>.tsv  tab-separated query-id / corpus-id / score, one
                       header line

Dataset downloading is out of scope; datasets must already be on disk in
this layout (or be plain JSONL files of ``{"_id": ..., "text": ...}``).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator, Sequence


def iter_jsonl_texts(paths: Sequence[str | Path]) -> Iterator[tuple[str, str]]:
    """Yield (id, text) pairs from JSONL files, in file order.

    Each line must be a JSON object with an ``_id`` (or ``id``) field and a
    ``text`` field; a ``title`` field, when present and non-empty, is
    prepended to the text.  Blank lines are skipped.
    """
    for path in paths:
        path = Path(path)
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
                doc_id = obj.get("_id", obj.get("id"))
                if doc_id is None:
                    raise ValueError(f"{path}:{lineno}: missing '_id' field")
                if "text" not in obj:
                    raise ValueError(f"{path}:{lineno}: missing 'text' field")
                yield str(doc_id), _join_title(obj.get("title"), obj["text"])


def _join_title(title, text) -> str:
    title = (title or "").strip()
    text = (text or "").strip()
    if title and text:
        return f"{title} {text}"
    return title or text


def iter_beir_corpus(dataset_dir: str | Path) -> Iterator[tuple[str, str]]:
    """Yield (doc_id, text) from <dataset_dir>/corpus.jsonl, titles prepended."""
    return iter_jsonl_texts([_require(Path(dataset_dir) / "corpus.jsonl")])


def iter_beir_queries(dataset_dir: str | Path) -> Iterator[tuple[str, str]]:
    """Yield (query_id, text) from <dataset_dir>/queries.jsonl."""
    return iter_jsonl_texts([_require(Path(dataset_dir) / "queries.jsonl")])


def _require(path: Path) -> Path:
    if not path.is_file():
        raise FileNotFoundError(
            f"{path} not found (expected a BEIR-layout dataset directory; "
            f"downloading by name is not supported)"
        )
    return path


def read_beir_qrels(dataset_dir: str | Path, split: str = "test") -> list[tuple[str, str, int]]:
    """Read qrels/<split>.tsv as (query_id, doc_id, grade) triples."""
    path = _require(Path(dataset_dir) / "qrels" / f"{split}.tsv")
    triples: list[tuple[str, str, int]] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            if lineno == 1 and not _is_int(fields[2]):
                continue  # header line: query-id  corpus-id  score
            if not _is_int(fields[2]):
                raise ValueError(f"{path}:{lineno}: bad grade {fields[2]!r}")
            triples.append((fields[0], fields[1], int(fields[2])))
    return triples


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def write_trec_qrels(triples: Sequence[tuple[str, str, int]], path: str | Path) -> None:
    """Write (query_id, doc_id, grade) triples as TREC qrels lines."""
    with open(path, "w", encoding="utf-8") as f:
        for qid, did, grade in triples:
            f.write(f"{qid} 0 {did} {grade}\n")


def convert_beir_qrels(dataset_dir: str | Path, out_path: str | Path,
                       split: str = "test") -> int:
    """Convert qrels/<split>.tsv to a TREC qrels file; returns line count."""
    triples = read_beir_qrels(dataset_dir, split)
    write_trec_qrels(triples, out_path)
    return len(triples)
