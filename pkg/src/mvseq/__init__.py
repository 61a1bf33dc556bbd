"""Multi-vector sequence compression and late-interaction retrieval.

A corpus of per-token embedding matrices can be shrunk, one document at a
time, by pruning low-importance tokens or pooling similar ones, then searched
with the MaxSim score and evaluated with standard ranking metrics.
"""

from .compress import (
    METHODS,
    POOL_METHODS,
    PRUNE_METHODS,
    CompressedDocument,
    CompressionConfig,
    CompressionError,
    budget,
    compress_corpus,
    compress_document,
    pool_by_anchors,
    pool_hierarchical,
    pool_kmeans,
    prune,
    spherical_kmeans,
    ward_cosine_clusters,
)
from .corpus import (
    CorpusFormatError,
    CorpusManifest,
    CorpusReader,
    DocumentRecord,
    ManifestEntry,
    read_corpus,
    validate_corpus,
    write_corpus,
)
from .importance import (
    SCORE_METHODS,
    IdfTable,
    ImportanceScores,
    build_idf_table,
    score_tokens,
    top_positions,
)
from .metrics import (
    EvalReport,
    Qrels,
    evaluate_run,
    load_qrels,
    ndcg_at_k,
    read_run,
    recall_at_k,
    write_run,
)
from .retrieval import RankedList, maxsim, search

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "POOL_METHODS",
    "PRUNE_METHODS",
    "SCORE_METHODS",
    "CompressedDocument",
    "CompressionConfig",
    "CompressionError",
    "CorpusFormatError",
    "CorpusManifest",
    "CorpusReader",
    "DocumentRecord",
    "EvalReport",
    "IdfTable",
    "ImportanceScores",
    "ManifestEntry",
    "Qrels",
    "RankedList",
    "budget",
    "build_idf_table",
    "compress_corpus",
    "compress_document",
    "evaluate_run",
    "load_qrels",
    "maxsim",
    "ndcg_at_k",
    "pool_by_anchors",
    "pool_hierarchical",
    "pool_kmeans",
    "prune",
    "read_corpus",
    "read_run",
    "recall_at_k",
    "score_tokens",
    "search",
    "spherical_kmeans",
    "top_positions",
    "validate_corpus",
    "ward_cosine_clusters",
    "write_corpus",
    "write_run",
    "__version__",
]
