"""Exhaustive late-interaction search.

score(Q, D) = sum over query rows of the maximum dot product against any
document row.  Every document is scored for every query (no candidate
generation, no approximation), so compression quality is measured without
an ANN confound; fewer document rows still means proportionally less work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import CorpusReader


@dataclass
class RankedList:
    """One query's results, ordered by (score desc, doc_id asc)."""

    query_id: str
    entries: list[tuple[str, float]]


def maxsim(query: np.ndarray, doc: np.ndarray) -> float:
    """Sum over query rows of the best dot product against the doc rows.

    Accumulates in float64 so results are independent of reduction order at
    the precision run files carry.
    """
    q = np.asarray(query)
    d = np.asarray(doc)
    if q.ndim != 2 or d.ndim != 2 or q.shape[0] == 0 or d.shape[0] == 0:
        raise ValueError("maxsim requires non-empty 2-D matrices")
    if q.shape[1] != d.shape[1]:
        raise ValueError(f"dimension mismatch {q.shape[1]} vs {d.shape[1]}")
    sims = q.astype(np.float64) @ d.astype(np.float64).T
    return float(sims.max(axis=1).sum())


def search(queries: CorpusReader, docs: CorpusReader, k: int = 100) -> list[RankedList]:
    """Top-min(k, N) documents per query by MaxSim, ties by doc_id ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if queries.dim != docs.dim:
        raise ValueError(f"dimension mismatch {queries.dim} vs {docs.dim}")
    if len(docs) == 0:
        raise ValueError("empty document corpus")

    doc_mats = [(rec.doc_id, rec.embeddings.astype(np.float64)) for rec in docs]
    results = []
    for q in queries:
        qmat = q.embeddings.astype(np.float64)
        scored = [
            (float((qmat @ dmat.T).max(axis=1).sum()), doc_id)
            for doc_id, dmat in doc_mats
        ]
        scored.sort(key=lambda t: (-t[0], t[1]))
        top = scored[: min(k, len(scored))]
        results.append(RankedList(q.doc_id, [(doc_id, s) for s, doc_id in top]))
    return results
