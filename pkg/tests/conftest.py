"""Shared builders and reference implementations for the test suite.

The naive_* functions are deliberately simple reimplementations (plain loops,
no caching) used as oracles against the optimized library code.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from mvseq import DocumentRecord, write_corpus


@pytest.fixture
def metric_cases():
    """Frozen metric fixtures; regenerate with tests/data/gen_metric_cases.py."""
    path = Path(__file__).parent / "data" / "metric_cases.json"
    return json.loads(path.read_text(encoding="utf-8"))


def rand_doc(gen: np.random.Generator, doc_id: str, length: int, dim: int,
             with_meta: bool = False, vocab: int = 64) -> DocumentRecord:
    """Random document; rows are kept away from zero norm."""
    emb = gen.standard_normal((length, dim))
    norms = np.linalg.norm(emb, axis=1)
    emb[norms < 1e-3] += 1.0  # vanishing rows are astronomically rare anyway
    rec = DocumentRecord(doc_id, emb.astype(np.float32))
    if with_meta:
        rec.token_ids = gen.integers(1, vocab, size=length).astype(np.uint32)
        rec.attention = gen.random(length).astype(np.float32)
    return rec


def make_corpus(gen: np.random.Generator, path, n_docs: int, dim: int,
                min_len: int = 2, max_len: int = 12, with_meta: bool = False):
    records = [
        rand_doc(gen, f"d{i:03d}", int(gen.integers(min_len, max_len + 1)), dim,
                 with_meta=with_meta)
        for i in range(n_docs)
    ]
    write_corpus(records, path)
    return records


def naive_maxsim(query: np.ndarray, doc: np.ndarray) -> float:
    """Double loop over (query row, doc row) pairs."""
    total = 0.0
    q = np.asarray(query, dtype=np.float64)
    d = np.asarray(doc, dtype=np.float64)
    for i in range(q.shape[0]):
        best = -np.inf
        for j in range(d.shape[0]):
            best = max(best, float(q[i] @ d[j]))
        total += best
    return total


def naive_ward(units: np.ndarray, k: int):
    """O(n^3) agglomeration oracle: full pair scan per merge, no caches.

    Same linkage, same (smallest label_a, then label_b) tie rule, same float
    operations as the library; only the search strategy differs.
    """
    n = units.shape[0]
    members = {i: [i] for i in range(n)}
    sizes = {i: 1.0 for i in range(n)}
    dist = 1.0 - units @ units.T
    d = {}
    for i in range(n):
        for j in range(i + 1, n):
            d[(i, j)] = float(dist[i, j])
    merges = []
    while len(members) > max(1, k):
        best = None
        for i in sorted(members):
            for j in sorted(members):
                if j <= i:
                    continue
                if best is None or d[(i, j)] < best[0]:
                    best = (d[(i, j)], i, j)
        _, a, b = best
        merges.append((a, b))
        d_ab = d[(a, b)]
        na, nb = sizes[a], sizes[b]
        for c in sorted(members):
            if c in (a, b):
                continue
            nc = sizes[c]
            dac = d[(min(a, c), max(a, c))]
            dbc = d[(min(b, c), max(b, c))]
            d[(min(a, c), max(a, c))] = (
                (na + nc) * dac + (nb + nc) * dbc - nc * d_ab
            ) / (na + nb + nc)
        members[a] = members[a] + members[b]
        sizes[a] = na + nb
        del members[b], sizes[b]
    clusters = [members[i] for i in sorted(members)]
    return clusters, merges


def bundle_corpus(build_seed: int = 2024):
    """Synthetic corpus where pooling is lossless and pruning is lossy.

    50 docs over an orthonormal vocabulary in d=40.  Each doc is a protected
    marker row plus 8 distinct unit basis vectors duplicated 5x (40 content
    rows): two "topic" vectors shared with queries and six fillers.  Doc i
    carries topics (i//5) and (i//5 + 10), so each of the 20 single-row
    queries has exactly 5 relevant docs.

    Because all directions are orthonormal, any pooling of the content rows
    leaves relevant docs with a strictly positive score and non-relevant docs
    at exactly zero, so rankings are unchanged.  Pruning that drops every
    copy of a topic bundle zeroes that doc's score instead.

    Token ids and attention are assigned pseudo-randomly per row (decoupled
    from the bundle structure) so attention/IDF pruning also drops bundles.
    """
    dim = 40
    basis = np.eye(dim, dtype=np.float32)
    topics = basis[:20]
    fillers = basis[20:32]
    marker = basis[39]

    gen = np.random.default_rng(build_seed)
    docs = []
    for i in range(50):
        a, b = i // 5, i // 5 + 10
        bundles = [topics[a], topics[b]] + [fillers[(i + j) % 12] for j in range(6)]
        rows = [marker]
        for vec in bundles:
            rows.extend([vec] * 5)
        emb = np.stack(rows)
        token_ids = gen.integers(1, 400, size=41).astype(np.uint32)
        attention = (gen.random(41) + 0.01).astype(np.float32)
        docs.append(DocumentRecord(f"d{i:02d}", emb, token_ids=token_ids,
                                   attention=attention))

    queries = [DocumentRecord(f"q{t:02d}", topics[t][None, :]) for t in range(20)]
    qrels = {f"q{t:02d}": {f"d{i:02d}": 1 for i in range(50)
                           if i // 5 == t or i // 5 + 10 == t}
             for t in range(20)}
    return docs, queries, qrels
