"""Sequence compression: the budget rule and the eight token-reduction methods.

Every method maps a document's L x d token matrix to a shorter matrix whose
rows are unit-normalized, never touching the protected marker at row 0:

    prune_{random,attention,idf}   keep the top-scored rows, drop the rest
    pool_{random,attention,idf}    top-scored rows become anchors; every row
                                   joins its nearest anchor by cosine; each
                                   cluster is replaced by its mean
    pool_kmeans                    spherical k-means partition, then means
    pool_hierarchical              bottom-up merging of the closest clusters
                                   (variance-minimizing linkage on cosine
                                   distances), then means
    none                           normalization only

Cluster means are taken over the raw (unnormalized) embeddings and the
result is normalized once at the end, so repeated tokens pool back to
exactly their shared direction.

The retained-vector budget for ratio r is C = max(1, round_half_up(r * L)),
counting the protected row, so the achieved compression matches r.  The one
deliberate budget overrun: C = 1 would leave a pooling method nothing to
pool into, so pooling emits the protected row plus a single mean of all
content rows (2 rows total); corpus summaries count these overruns.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CorpusReader, DocumentRecord, write_corpus
from .importance import IdfTable, ImportanceScores, score_tokens, top_positions
from .rng import SplitMix64, stream_key

METHODS = (
    "none",
    "prune_random",
    "prune_attention",
    "prune_idf",
    "pool_random",
    "pool_attention",
    "pool_idf",
    "pool_kmeans",
    "pool_hierarchical",
)
PRUNE_METHODS = ("prune_random", "prune_attention", "prune_idf")
POOL_METHODS = (
    "pool_random",
    "pool_attention",
    "pool_idf",
    "pool_kmeans",
    "pool_hierarchical",
)


class CompressionError(Exception):
    """A document could not be compressed; the message names the document."""


@dataclass
class CompressionConfig:
    method: str
    ratio: float = 1.0
    seed: int = 0
    kmeans_max_iters: int = 20
    kmeans_tolerance: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not (0.0 < self.ratio <= 1.0):
            raise ValueError(f"ratio must be in (0, 1], got {self.ratio}")
        if self.kmeans_max_iters < 1:
            raise ValueError("kmeans_max_iters must be >= 1")


@dataclass
class CompressedDocument:
    """A shortened token matrix plus the positions each output row came from.

    provenance[i] lists the original row indices that produced output row i:
    singletons for pruning (a subset of the input rows), a full partition of
    0..L-1 for pooling.  Row 0 always derives from input row 0 alone.
    """

    doc_id: str
    embeddings: np.ndarray
    provenance: list[list[int]] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return int(self.embeddings.shape[0])


def budget(length: int, ratio: float) -> int:
    """Retained-vector count C for a document of `length` rows at `ratio`.

    Half-up rounding, floored at 1 so the protected row always survives,
    capped at the document length.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if not (0.0 < ratio <= 1.0):
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    return min(length, max(1, int(math.floor(ratio * length + 0.5))))


def _unit_rows(matrix: np.ndarray, doc_id: str) -> np.ndarray:
    """Rows scaled to unit length, as float64. Zero rows are an input error."""
    x = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1)
    if norms.size and norms.min() < 1e-12:
        row = int(np.argmin(norms))
        raise ValueError(f"doc {doc_id!r}: zero-norm embedding at row {row}")
    return x / norms[:, None]


def _emit(doc: DocumentRecord, groups: list[list[int]]) -> CompressedDocument:
    """Build the output document from groups of original row indices.

    Each group becomes one row: the mean of the raw member embeddings,
    normalized.  Groups are emitted in the given order.
    """
    raw = doc.embeddings.astype(np.float64)
    out = np.empty((len(groups), doc.dim), dtype=np.float64)
    for i, members in enumerate(groups):
        mean = raw[members].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm < 1e-12:
            raise ValueError(
                f"doc {doc.doc_id!r}: pooled rows {members} cancel to a zero vector"
            )
        out[i] = mean / norm
    return CompressedDocument(
        doc_id=doc.doc_id,
        embeddings=out.astype(np.float32),
        provenance=[list(g) for g in groups],
    )


def _identity_groups(length: int) -> list[list[int]]:
    return [[i] for i in range(length)]


def prune(doc: DocumentRecord, scores: ImportanceScores, count: int) -> CompressedDocument:
    """Keep the protected row plus the count-1 best-scored content rows."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if len(scores.scores) != doc.length - 1:
        raise ValueError(
            f"doc {doc.doc_id!r}: got {len(scores.scores)} scores for "
            f"{doc.length - 1} content rows"
        )
    _unit_rows(doc.embeddings, doc.doc_id)  # reject zero rows up front
    if count >= doc.length:
        return _emit(doc, _identity_groups(doc.length))
    kept = [0] + top_positions(scores, count - 1)
    return _emit(doc, [[p] for p in kept])


def pool_by_anchors(
    doc: DocumentRecord, scores: ImportanceScores, count: int
) -> CompressedDocument:
    """Cluster content rows around the count-1 best-scored anchor rows.

    Every content row (anchors included) joins the anchor with the highest
    cosine similarity; similarity ties go to the earliest anchor.  An anchor
    whose rows were all captured by an identical earlier anchor yields an
    empty cluster and is dropped.  Output rows follow anchor position order.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if len(scores.scores) != doc.length - 1:
        raise ValueError(
            f"doc {doc.doc_id!r}: got {len(scores.scores)} scores for "
            f"{doc.length - 1} content rows"
        )
    units = _unit_rows(doc.embeddings, doc.doc_id)
    n = doc.length - 1
    if count >= doc.length:
        return _emit(doc, _identity_groups(doc.length))
    k = count - 1
    if n == 0:
        return _emit(doc, [[0]])
    if k <= 0:
        # C=1 would discard every content token; pool them all instead.
        return _emit(doc, [[0], list(range(1, doc.length))])

    anchors = top_positions(scores, k)  # ascending original positions
    sims = units[1:] @ units[anchors].T  # (n, k)
    assign = np.argmax(sims, axis=1)  # ties -> earliest anchor
    groups: list[list[int]] = [[] for _ in anchors]
    for content_idx, a in enumerate(assign):
        groups[a].append(content_idx + 1)
    kept_groups = [g for g in groups if g]
    return _emit(doc, [[0]] + kept_groups)


def spherical_kmeans(
    units: np.ndarray,
    k: int,
    key: int,
    max_iters: int = 20,
    tolerance: float = 0.0,
) -> tuple[np.ndarray, list[float]]:
    """Spherical k-means over unit rows; returns (labels, objective history).

    Seeding is k-means++ with squared cosine-distance weights drawn from the
    pinned generator for `key`.  Assignment maximizes the dot product with
    unit centroids; the update renormalizes cluster means.  An empty cluster
    steals the point least similar to its current centroid.  The objective
    (sum of point-to-centroid cosines, one entry per completed iteration) is
    non-decreasing.
    """
    n = units.shape[0]
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    gen = SplitMix64(key)

    chosen = [gen.next_below(n)]
    sim = units @ units[chosen[0]]
    while len(chosen) < k:
        w = np.square(np.maximum(1.0 - sim, 0.0))
        total = float(w.sum())
        if total > 1e-12:
            r = gen.next_float() * total
            new = min(int(np.searchsorted(np.cumsum(w), r, side="right")), n - 1)
        else:
            # every remaining point duplicates a center; fill deterministically
            taken = set(chosen)
            new = next(i for i in range(n) if i not in taken)
        chosen.append(new)
        sim = np.maximum(sim, units @ units[new])

    centers = units[chosen].copy()
    labels: np.ndarray | None = None
    history: list[float] = []
    for _ in range(max_iters):
        sims = units @ centers.T
        new_labels = np.argmax(sims, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        for c in np.nonzero(counts == 0)[0]:
            own = sims[np.arange(n), labels]
            candidates = np.where(counts[labels] >= 2, own, np.inf)
            p = int(np.argmin(candidates))
            counts[labels[p]] -= 1
            labels[p] = c
            counts[c] = 1
        objective = 0.0
        for c in range(k):
            members = np.nonzero(labels == c)[0]
            s = units[members].sum(axis=0)
            norm = float(np.linalg.norm(s))
            objective += norm
            if norm > 1e-12:
                centers[c] = s / norm
            else:
                centers[c] = units[members[0]]
        prev = history[-1] if history else None
        history.append(objective)
        if tolerance > 0.0 and prev is not None and objective - prev <= tolerance:
            break
    assert labels is not None
    return labels, history


def pool_kmeans(
    doc: DocumentRecord,
    count: int,
    seed: int = 0,
    max_iters: int = 20,
    tolerance: float = 0.0,
) -> CompressedDocument:
    """Partition content rows into count-1 spherical k-means clusters."""
    if count < 1:
        raise ValueError("count must be >= 1")
    units = _unit_rows(doc.embeddings, doc.doc_id)
    n = doc.length - 1
    if count >= doc.length:
        return _emit(doc, _identity_groups(doc.length))
    k = count - 1
    if n == 0:
        return _emit(doc, [[0]])
    if k <= 0:
        return _emit(doc, [[0], list(range(1, doc.length))])

    key = stream_key(seed, doc.doc_id, "kmeans")
    labels, _ = spherical_kmeans(units[1:], k, key, max_iters, tolerance)
    groups: dict[int, list[int]] = {}
    for content_idx, c in enumerate(labels):
        groups.setdefault(int(c), []).append(content_idx + 1)
    ordered = sorted(groups.values(), key=lambda g: g[0])
    return _emit(doc, [[0]] + ordered)


def ward_cosine_clusters(
    units: np.ndarray, k: int
) -> tuple[list[list[int]], list[tuple[int, int]]]:
    """Agglomerate unit rows down to k clusters; variance-style linkage on
    cosine distances.

    Start from singletons with d(i, j) = 1 - cos(u_i, u_j); repeatedly merge
    the closest pair, updating distances by the Lance-Williams recurrence

        d(a+b, c) = ((n_a+n_c) d(a,c) + (n_b+n_c) d(b,c) - n_c d(a,b))
                    / (n_a + n_b + n_c).

    A cluster is labeled by its smallest member index; among equally-close
    pairs the one with the lexicographically smallest (label_a, label_b)
    merges first.  Returns member lists (ordered by label) and the merge
    sequence as (label_a, label_b) pairs.

    Runs in O(n^2) time for typical inputs by caching, per row, the best
    partner among higher-labeled clusters, and revalidating only the caches
    a merge can touch.
    """
    n = units.shape[0]
    k = max(1, k)
    if n == 0:
        return [], []
    members: list[list[int]] = [[i] for i in range(n)]
    if n <= k:
        return members, []

    dist = 1.0 - units @ units.T
    np.fill_diagonal(dist, np.inf)
    active = np.ones(n, dtype=bool)
    sizes = np.ones(n, dtype=np.float64)

    best_d = np.full(n, np.inf)
    best_j = np.full(n, -1, dtype=np.int64)

    def recompute(row: int):
        seg = dist[row, row + 1 :]
        act = active[row + 1 :]
        if not act.any():
            best_d[row] = np.inf
            best_j[row] = -1
            return
        vals = np.where(act, seg, np.inf)
        arg = int(np.argmin(vals))
        best_d[row] = vals[arg]
        best_j[row] = row + 1 + arg

    for i in range(n - 1):
        recompute(i)

    merges: list[tuple[int, int]] = []
    remaining = n
    while remaining > k:
        a = int(np.argmin(best_d))
        b = int(best_j[a])
        d_ab = dist[a, b]
        merges.append((a, b))

        others = np.nonzero(active)[0]
        others = others[(others != a) & (others != b)]
        if others.size:
            na, nb = sizes[a], sizes[b]
            nc = sizes[others]
            new_d = (
                (na + nc) * dist[a, others]
                + (nb + nc) * dist[b, others]
                - nc * d_ab
            ) / (na + nb + nc)
            dist[a, others] = new_d
            dist[others, a] = new_d

        dist[b, :] = np.inf
        dist[:, b] = np.inf
        sizes[a] += sizes[b]
        members[a].extend(members[b])
        active[b] = False
        best_d[b] = np.inf
        best_j[b] = -1
        remaining -= 1

        recompute(a)
        below = others[others < a]
        if below.size:
            col = dist[below, a]
            bd = best_d[below]
            bj = best_j[below]
            direct = (col < bd) | ((col == bd) & (bj > a))
            idx = below[direct]
            best_d[idx] = col[direct]
            best_j[idx] = a
            stale = below[((bj == a) | (bj == b)) & ~direct]
            for row in stale:
                recompute(int(row))
        between = others[(others > a) & (others < b)]
        for row in between[best_j[between] == b]:
            recompute(int(row))

    clusters = [members[i] for i in np.nonzero(active)[0]]
    return clusters, merges


def pool_hierarchical(doc: DocumentRecord, count: int) -> CompressedDocument:
    """Partition content rows into count-1 agglomerative clusters."""
    if count < 1:
        raise ValueError("count must be >= 1")
    units = _unit_rows(doc.embeddings, doc.doc_id)
    n = doc.length - 1
    if count >= doc.length:
        return _emit(doc, _identity_groups(doc.length))
    k = count - 1
    if n == 0:
        return _emit(doc, [[0]])
    if k <= 0:
        return _emit(doc, [[0], list(range(1, doc.length))])

    clusters, _ = ward_cosine_clusters(units[1:], k)
    groups = [[idx + 1 for idx in cluster] for cluster in clusters]
    return _emit(doc, [[0]] + groups)


def compress_document(
    doc: DocumentRecord,
    config: CompressionConfig,
    idf: IdfTable | None = None,
) -> CompressedDocument:
    """Apply the configured method to one document."""
    if config.method == "none":
        _unit_rows(doc.embeddings, doc.doc_id)
        return _emit(doc, _identity_groups(doc.length))

    count = budget(doc.length, config.ratio)
    if config.method == "pool_kmeans":
        return pool_kmeans(
            doc,
            count,
            seed=config.seed,
            max_iters=config.kmeans_max_iters,
            tolerance=config.kmeans_tolerance,
        )
    if config.method == "pool_hierarchical":
        return pool_hierarchical(doc, count)

    family, scoring = config.method.split("_", 1)
    scores = score_tokens(doc, scoring, idf=idf, seed=config.seed)
    if family == "prune":
        return prune(doc, scores, count)
    return pool_by_anchors(doc, scores, count)


def compress_corpus(
    corpus: CorpusReader,
    config: CompressionConfig,
    out: str | Path,
    idf: IdfTable | None = None,
    jobs: int = 1,
) -> dict:
    """Compress every document and write a new corpus directory.

    The output corpus carries embeddings only (token ids and attention no
    longer align with pooled rows).  Returns a summary with token counts,
    the achieved ratio, wall time, and the number of documents where the
    C=1 pooling rule exceeded its budget.
    """
    from .importance import build_idf_table

    t0 = time.perf_counter()
    if config.method in ("prune_attention", "pool_attention") and not corpus.has_attention:
        raise ValueError(f"method {config.method} requires attention data in the corpus")
    if config.method in ("prune_idf", "pool_idf"):
        if idf is None:
            if not corpus.has_token_ids:
                raise ValueError(
                    f"method {config.method} requires token ids "
                    "(corpus has none and no IDF table was provided)"
                )
            idf = build_idf_table(corpus)

    def one(doc: DocumentRecord) -> tuple[int, CompressedDocument]:
        try:
            return doc.length, compress_document(doc, config, idf=idf)
        except Exception as exc:
            raise CompressionError(f"doc {doc.doc_id!r}: {exc}") from exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, corpus))
    else:
        results = [one(doc) for doc in corpus]

    input_tokens = sum(length for length, _ in results)
    compressed = [c for _, c in results]
    output_tokens = sum(c.rows for c in compressed)
    overruns = sum(
        1
        for (length, c) in results
        if config.method in POOL_METHODS and c.rows > budget(length, config.ratio)
    )
    write_corpus(
        [DocumentRecord(c.doc_id, c.embeddings) for c in compressed], out
    )
    return {
        "docs": len(compressed),
        "input_tokens": input_tokens,
        "output_tokens": output_tokens,
        "achieved_ratio": output_tokens / input_tokens,
        "wall_time": time.perf_counter() - t0,
        "budget_overrun_docs": overruns,
    }
