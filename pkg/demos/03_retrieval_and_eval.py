"""Search a compressed corpus and score the run against relevance judgments.

Builds a corpus where each document carries its topic in a small bundle of
near-duplicate rows (the rest is noise), compresses it, runs exhaustive
MaxSim retrieval, and reports nDCG@10 / Recall@10 relative to the
uncompressed baseline.  Pooling merges the bundle and keeps the topic
signal; random pruning at the same budget often deletes it outright.

Run:  python3 demos/03_retrieval_and_eval.py
"""

import tempfile
from pathlib import Path

import numpy as np

from mvseq import (
    CompressionConfig,
    DocumentRecord,
    compress_corpus,
    evaluate_run,
    read_corpus,
    search,
    write_corpus,
    write_run,
)


def main():
    gen = np.random.default_rng(21)
    dim, n_topics = 12, 5
    topics = gen.standard_normal((n_topics, dim)).astype(np.float32)

    docs, qrels = [], {}
    for i in range(30):
        topic = i % n_topics
        length = int(gen.integers(16, 24))
        emb = gen.standard_normal((length, dim)).astype(np.float32)
        # rows 1..3 are near-duplicates of the topic vector; the rest is noise
        emb[1:4] = topics[topic] + 0.15 * gen.standard_normal((3, dim)).astype(np.float32)
        docs.append(DocumentRecord(f"d{i:02d}", emb))
        qrels.setdefault(f"q{topic}", {})[f"d{i:02d}"] = 1

    queries = [DocumentRecord(f"q{t}", topics[t][None, :]) for t in range(n_topics)]

    with tempfile.TemporaryDirectory() as td:
        td = Path(td)
        write_corpus(docs, td / "docs")
        write_corpus(queries, td / "queries")
        docs_reader = read_corpus(td / "docs")
        queries_reader = read_corpus(td / "queries")

        def evaluate(method, ratio):
            compress_corpus(docs_reader,
                            CompressionConfig(method=method, ratio=ratio, seed=3),
                            td / method)
            run = search(queries_reader, read_corpus(td / method), k=10)
            write_run(run, td / f"{method}.trec", tag=method)
            return evaluate_run(run, qrels, k_ndcg=10, k_recall=10)

        base = evaluate("none", 1.0)
        print(f"baseline: nDCG@10 {base.mean_ndcg:.4f}  "
              f"Recall@10 {base.mean_recall:.4f}  "
              f"({base.query_count} queries)\n")

        for method in ("prune_random", "pool_hierarchical"):
            report = evaluate(method, 0.25)
            print(f"{method:18s} r=0.25  nDCG@10 {report.mean_ndcg:.4f} "
                  f"({report.mean_ndcg / base.mean_ndcg:6.1%} of baseline)  "
                  f"Recall@10 {report.mean_recall:.4f}")

        run_line = (td / "pool_hierarchical.trec").read_text().splitlines()[0]
        print(f"\nrun files written under {td} (deleted on exit); the TREC")
        print(f"lines look like:  {run_line}")


if __name__ == "__main__":
    main()
