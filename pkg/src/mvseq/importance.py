"""Per-token importance scoring: random, attention, and IDF.

Scores cover the non-protected positions 1..L-1 of a document; the marker
token at position 0 is never scored and never competes for the budget.
Both pruning and anchor selection consume these scores, so determinism here
(pinned RNG, stable tie order downstream) makes whole pipelines replayable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import CorpusReader, DocumentRecord
from .rng import stream_key, unit_float

SCORE_METHODS = ("random", "attention", "idf")


@dataclass
class IdfTable:
    """Document-frequency statistics over a corpus.

    idf(t) = ln((N + 1) / (df(t) + 1)), the smoothed variant: defined and
    non-negative even for tokens never seen in the corpus (df = 0).
    """

    doc_count: int
    df: dict[int, int] = field(default_factory=dict)

    def idf(self, token_id: int) -> float:
        return math.log((self.doc_count + 1) / (self.df.get(int(token_id), 0) + 1))

    def to_json(self) -> str:
        return json.dumps(
            {"doc_count": self.doc_count, "df": {str(t): c for t, c in self.df.items()}}
        )

    @classmethod
    def from_json(cls, text: str) -> "IdfTable":
        raw = json.loads(text)
        return cls(
            doc_count=int(raw["doc_count"]),
            df={int(t): int(c) for t, c in raw["df"].items()},
        )

    def save(self, path: str | Path):
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "IdfTable":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass
class ImportanceScores:
    """Scores for positions 1..L-1 of one document (position 0 is protected)."""

    doc_id: str
    scores: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)


def build_idf_table(corpus: CorpusReader) -> IdfTable:
    """Count, for each token id, the number of documents containing it."""
    if not corpus.has_token_ids:
        raise ValueError("corpus lacks token ids; cannot build an IDF table")
    df: dict[int, int] = {}
    for rec in corpus:
        for t in np.unique(rec.token_ids):
            t = int(t)
            df[t] = df.get(t, 0) + 1
    return IdfTable(doc_count=len(corpus), df=df)


def score_tokens(
    doc: DocumentRecord,
    method: str,
    idf: IdfTable | None = None,
    seed: int = 0,
) -> ImportanceScores:
    """Score the non-protected tokens of one document.

    random    -> uniform [0, 1) draws keyed by (seed, doc_id, position)
    attention -> the document's stored attention totals, copied verbatim
    idf       -> table lookup on the document's token ids
    """
    if method not in SCORE_METHODS:
        raise ValueError(f"unknown scoring method {method!r}")
    n = doc.length - 1

    if method == "attention":
        if doc.attention is None:
            raise ValueError(f"doc {doc.doc_id!r} has no attention field")
        scores = doc.attention[1:].astype(np.float64)
    elif method == "idf":
        if idf is None:
            raise ValueError("idf scoring requires an IdfTable")
        if doc.token_ids is None:
            raise ValueError(f"doc {doc.doc_id!r} has no token ids")
        scores = np.array([idf.idf(t) for t in doc.token_ids[1:]], dtype=np.float64)
    else:
        base = stream_key(seed, doc.doc_id)
        scores = np.array(
            [unit_float(base + pos) for pos in range(1, n + 1)], dtype=np.float64
        )
    return ImportanceScores(doc_id=doc.doc_id, scores=scores)


def top_positions(scores: ImportanceScores, k: int) -> list[int]:
    """Original positions (1-based within the doc) of the k best scores.

    Ties break toward the lower original position; the result is returned in
    ascending position order.
    """
    n = len(scores.scores)
    if k >= n:
        return list(range(1, n + 1))
    if k <= 0:
        return []
    # stable sort on -score keeps the lower position first among ties
    order = np.argsort(-scores.scores, kind="stable")[:k]
    return sorted(int(i) + 1 for i in order)
