"""High-level export entry points: documents and queries to corpus dirs."""

from __future__ import annotations

from pathlib import Path

from .config import ExportConfig
from .data import convert_beir_qrels, iter_beir_corpus, iter_beir_queries, iter_jsonl_texts
from .encoder import Encoder
from .writer import CorpusWriter


def _input_texts(config: ExportConfig, *, queries: bool):
    if config.dataset_dir is not None:
        if queries:
            return iter_beir_queries(config.dataset_dir)
        return iter_beir_corpus(config.dataset_dir)
    return iter_jsonl_texts(config.jsonl_paths)


def export_documents(config: ExportConfig, encoder: Encoder | None = None) -> dict:
    """Encode documents into a corpus directory with token ids and attention.

    Each document contributes its final hidden states (projected when the
    checkpoint ships an output projection), token ids, and per-token
    attention totals from the final transformer layer.  Documents longer
    than ``doc_max_length`` tokens are truncated to exactly that many rows.
    Returns a summary dict: {docs, tokens, dim, output}.
    """
    encoder = encoder or Encoder(
        config.model, device=config.device, deterministic=config.deterministic
    )
    writer: CorpusWriter | None = None
    try:
        for item in encoder.encode_all(
            _input_texts(config, queries=False),
            max_length=config.doc_max_length,
            with_attention=True,
            batch_size=config.batch_size,
        ):
            if writer is None:
                writer = CorpusWriter(
                    config.output_dir,
                    dim=encoder.output_dim,
                    has_token_ids=True,
                    has_attention=True,
                )
            writer.add(item.doc_id, item.embeddings, item.token_ids, item.attention)
    except Exception:
        if writer is not None:
            writer.abort()
        raise
    if writer is None:
        raise ValueError("no documents found in the input")
    summary = {
        "docs": writer.doc_count,
        "tokens": writer.token_count,
        "dim": writer.dim,
        "output": str(Path(config.output_dir)),
    }
    writer.close()
    return summary


def export_queries(config: ExportConfig, encoder: Encoder | None = None) -> dict:
    """Encode queries into an embeddings-only corpus directory.

    Queries are encoded exactly as tokenized — no expansion tokens are
    appended — and truncated to ``query_max_length``.  The output manifest
    has has_attention=false and has_token_ids=false.  For BEIR-layout
    datasets, the chosen qrels split is also converted to TREC qrels at
    ``<output_dir>/qrels.txt``.  An empty query text is an error naming the
    query id.  Returns a summary dict: {queries, tokens, dim, output,
    qrels [when written]}.
    """
    encoder = encoder or Encoder(
        config.model, device=config.device, deterministic=config.deterministic
    )

    def checked_texts():
        for query_id, text in _input_texts(config, queries=True):
            if not text.strip():
                raise ValueError(f"query {query_id!r}: empty text")
            yield query_id, text

    writer: CorpusWriter | None = None
    try:
        for item in encoder.encode_all(
            checked_texts(),
            max_length=config.query_max_length,
            with_attention=False,
            batch_size=config.batch_size,
        ):
            if writer is None:
                writer = CorpusWriter(
                    config.output_dir,
                    dim=encoder.output_dim,
                    has_token_ids=False,
                    has_attention=False,
                )
            writer.add(item.doc_id, item.embeddings)
    except Exception:
        if writer is not None:
            writer.abort()
        raise
    if writer is None:
        raise ValueError("no queries found in the input")
    summary = {
        "queries": writer.doc_count,
        "tokens": writer.token_count,
        "dim": writer.dim,
        "output": str(Path(config.output_dir)),
    }
    writer.close()

    if config.dataset_dir is not None:
        qrels_tsv = Path(config.dataset_dir) / "qrels" / f"{config.qrels_split}.tsv"
        if qrels_tsv.is_file():
            qrels_out = Path(config.output_dir) / "qrels.txt"
            count = convert_beir_qrels(
                config.dataset_dir, qrels_out, config.qrels_split
            )
            summary["qrels"] = str(qrels_out)
            summary["qrels_lines"] = count
    return summary
