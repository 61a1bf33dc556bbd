"""Run a full method-by-ratio sweep through the command-line interface.

Produces the deterministic report CSV plus the timing sidecar, then prints
the quality table.  Equivalent shell command:

    mvseq sweep --docs DOCS --queries QUERIES --qrels QRELS \
        --methods pool_hierarchical pool_kmeans prune_idf \
        --ratios 0.2 0.5 --report report.csv

Run:  python3 demos/04_ratio_sweep.py
"""

import tempfile
from pathlib import Path

import numpy as np

from mvseq import DocumentRecord, write_corpus
from mvseq.cli import main as mvseq_main


def build_inputs(root: Path):
    gen = np.random.default_rng(42)
    dim, n_topics = 10, 4
    topics = gen.standard_normal((n_topics, dim)).astype(np.float32)

    docs, qrels_lines = [], []
    for i in range(24):
        topic = i % n_topics
        length = int(gen.integers(10, 24))
        emb = 0.3 * gen.standard_normal((length, dim)).astype(np.float32)
        emb[1:] += topics[topic]
        docs.append(DocumentRecord(
            f"d{i:02d}", emb,
            token_ids=gen.integers(1, 200, size=length).astype(np.uint32),
            attention=gen.random(length).astype(np.float32),
        ))
        qrels_lines.append(f"q{topic} 0 d{i:02d} 1\n")

    write_corpus(docs, root / "docs")
    write_corpus([DocumentRecord(f"q{t}", topics[t][None, :])
                  for t in range(n_topics)], root / "queries")
    (root / "qrels.txt").write_text("".join(qrels_lines))


def main():
    with tempfile.TemporaryDirectory() as td:
        root = Path(td)
        build_inputs(root)
        report = root / "report.csv"
        code = mvseq_main([
            "sweep",
            "--docs", str(root / "docs"),
            "--queries", str(root / "queries"),
            "--qrels", str(root / "qrels.txt"),
            "--methods", "pool_hierarchical", "pool_kmeans", "prune_idf",
            "--ratios", "0.2", "0.5",
            "--seed", "13",
            "--report", str(report),
        ])
        assert code == 0

        print("\nreport.csv:")
        print(report.read_text())
        print("timing sidecar (wall-clock, excluded from the deterministic report):")
        print(report.with_suffix(".timings.csv").read_text())


if __name__ == "__main__":
    main()
