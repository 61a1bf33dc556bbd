"""Encode text corpora into token-embedding corpus directories.

Turns BEIR-layout datasets or plain JSONL collections into the binary
corpus format consumed by the mvseq retrieval pipeline: per-token
embeddings from a pretrained transformer checkpoint, token ids, and
per-token attention totals from the final layer, plus TREC qrels.
"""

from .config import ExportConfig
from .data import (
    convert_beir_qrels,
    iter_beir_corpus,
    iter_beir_queries,
    iter_jsonl_texts,
    read_beir_qrels,
    write_trec_qrels,
)
from .encoder import EncodedText, Encoder
from .export import export_documents, export_queries
from .writer import CorpusWriter

__version__ = "0.1.0"

__all__ = [
    "CorpusWriter",
    "EncodedText",
    "Encoder",
    "ExportConfig",
    "convert_beir_qrels",
    "export_documents",
    "export_queries",
    "iter_beir_corpus",
    "iter_beir_queries",
    "iter_jsonl_texts",
    "read_beir_qrels",
    "write_trec_qrels",
    "__version__",
]
