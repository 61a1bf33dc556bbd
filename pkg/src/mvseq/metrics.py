"""Ranking quality metrics and TREC-format run/qrels I/O.

nDCG uses the trec_eval convention: linear gains rel_i / log2(i + 1) by
default, with 2^rel - 1 gains available behind the `gain` argument (the two
agree on binary judgments).  Queries without a positive judgment cannot be
ranked meaningfully and are excluded from averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .retrieval import RankedList

# query_id -> doc_id -> relevance grade
Qrels = dict[str, dict[str, int]]

GAINS = ("linear", "exp")


def load_qrels(path: str | Path) -> Qrels:
    """Parse TREC qrels lines `query_id 0 doc_id grade`.

    Strict on field count; later duplicates of a (query, doc) pair win.
    """
    qrels: Qrels = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(
                    f"{path}:{lineno}: expected 4 fields `query 0 doc grade`, "
                    f"got {len(parts)}"
                )
            query_id, _, doc_id, grade_text = parts
            try:
                grade = int(grade_text)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: grade {grade_text!r} is not an integer")
            if grade < 0:
                raise ValueError(f"{path}:{lineno}: negative grade {grade}")
            qrels.setdefault(query_id, {})[doc_id] = grade
    return qrels


def _gain(rel: int, gain: str) -> float:
    if gain == "linear":
        return float(rel)
    return float(2**rel - 1)


def _dcg(grades, gain: str) -> float:
    return sum(_gain(rel, gain) / math.log2(i + 2) for i, rel in enumerate(grades))


def ndcg_at_k(ranked: RankedList, qrels: Qrels, k: int = 10, gain: str = "linear") -> float:
    """Normalized discounted cumulative gain at cutoff k."""
    if gain not in GAINS:
        raise ValueError(f"gain must be one of {GAINS}")
    judgments = qrels.get(ranked.query_id)
    if judgments is None:
        raise KeyError(f"query {ranked.query_id!r} absent from qrels")
    ideal = sorted(judgments.values(), reverse=True)[:k]
    idcg = _dcg(ideal, gain)
    if idcg == 0.0:
        raise ValueError(f"query {ranked.query_id!r} has no positive judgment")
    got = [judgments.get(doc_id, 0) for doc_id, _ in ranked.entries[:k]]
    return _dcg(got, gain) / idcg


def recall_at_k(ranked: RankedList, qrels: Qrels, k: int = 100) -> float:
    """Fraction of the relevant (grade > 0) documents found in the top k."""
    judgments = qrels.get(ranked.query_id)
    if judgments is None:
        raise KeyError(f"query {ranked.query_id!r} absent from qrels")
    relevant = {doc_id for doc_id, rel in judgments.items() if rel > 0}
    if not relevant:
        raise ValueError(f"query {ranked.query_id!r} has no positive judgment")
    found = sum(1 for doc_id, _ in ranked.entries[:k] if doc_id in relevant)
    return found / len(relevant)


@dataclass
class EvalReport:
    ndcg_cutoff: int
    recall_cutoff: int
    mean_ndcg: float
    mean_recall: float
    query_count: int
    skipped_count: int
    per_query: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            f"ndcg_at_{self.ndcg_cutoff}": self.mean_ndcg,
            f"recall_at_{self.recall_cutoff}": self.mean_recall,
            "query_count": self.query_count,
            "skipped_count": self.skipped_count,
            "per_query": self.per_query,
        }

    def csv_header(self) -> str:
        return f"queries,skipped,ndcg_at_{self.ndcg_cutoff},recall_at_{self.recall_cutoff}"

    def csv_row(self) -> str:
        return (
            f"{self.query_count},{self.skipped_count},"
            f"{self.mean_ndcg:.6f},{self.mean_recall:.6f}"
        )


def evaluate_run(
    run: list[RankedList],
    qrels: Qrels,
    k_ndcg: int = 10,
    k_recall: int = 100,
    gain: str = "linear",
) -> EvalReport:
    """Mean nDCG and recall over the evaluable queries of a run.

    Queries missing from the qrels, or judged but with no positive grade,
    are skipped and counted rather than scored.
    """
    per_query: dict[str, dict[str, float]] = {}
    skipped = 0
    for ranked in run:
        judgments = qrels.get(ranked.query_id)
        if judgments is None or not any(rel > 0 for rel in judgments.values()):
            skipped += 1
            continue
        per_query[ranked.query_id] = {
            "ndcg": ndcg_at_k(ranked, qrels, k=k_ndcg, gain=gain),
            "recall": recall_at_k(ranked, qrels, k=k_recall),
        }
    if not per_query:
        raise ValueError("no evaluable queries (empty run/qrels intersection)")
    n = len(per_query)
    return EvalReport(
        ndcg_cutoff=k_ndcg,
        recall_cutoff=k_recall,
        mean_ndcg=sum(v["ndcg"] for v in per_query.values()) / n,
        mean_recall=sum(v["recall"] for v in per_query.values()) / n,
        query_count=n,
        skipped_count=skipped,
        per_query=per_query,
    )


def write_run(run: list[RankedList], path: str | Path, tag: str = "mvseq"):
    """Write TREC run lines `query_id Q0 doc_id rank score tag`."""
    with open(path, "w", encoding="utf-8") as f:
        for ranked in run:
            for rank, (doc_id, score) in enumerate(ranked.entries, start=1):
                f.write(f"{ranked.query_id} Q0 {doc_id} {rank} {score:.6f} {tag}\n")


def read_run(path: str | Path) -> list[RankedList]:
    """Read a TREC run file back into ranked lists, in file order.

    Ranks must be 1-based and ascending within each query.
    """
    order: list[str] = []
    entries: dict[str, list[tuple[str, float]]] = {}
    last_rank: dict[str, int] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6:
                raise ValueError(
                    f"{path}:{lineno}: expected 6 fields `query Q0 doc rank score tag`, "
                    f"got {len(parts)}"
                )
            query_id, _, doc_id, rank_text, score_text, _ = parts
            try:
                rank = int(rank_text)
                score = float(score_text)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad rank/score")
            expected = last_rank.get(query_id, 0) + 1
            if rank != expected:
                raise ValueError(
                    f"{path}:{lineno}: rank {rank} for query {query_id!r}, "
                    f"expected {expected}"
                )
            last_rank[query_id] = rank
            if query_id not in entries:
                order.append(query_id)
                entries[query_id] = []
            entries[query_id].append((doc_id, score))
    return [RankedList(qid, entries[qid]) for qid in order]
