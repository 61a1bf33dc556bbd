"""Compress one document with every method and compare what survives.

The document is built from three "topic" directions duplicated several times
plus a little noise, so pooling methods can merge duplicates while pruning
methods must throw rows away.

Run:  python3 demos/02_compression_methods.py
"""

import numpy as np

from mvseq import (
    METHODS,
    CompressionConfig,
    DocumentRecord,
    IdfTable,
    budget,
    compress_document,
    maxsim,
)


def build_doc(gen):
    topics = gen.standard_normal((3, 8)).astype(np.float32)
    rows = [gen.standard_normal(8).astype(np.float32)]  # marker token
    for topic in topics:
        for _ in range(4):
            rows.append(topic + 0.05 * gen.standard_normal(8).astype(np.float32))
    emb = np.stack(rows)
    length = emb.shape[0]
    return DocumentRecord(
        "demo-doc", emb,
        token_ids=gen.integers(1, 50, size=length).astype(np.uint32),
        attention=gen.random(length).astype(np.float32),
    ), topics


def main():
    gen = np.random.default_rng(7)
    doc, topics = build_doc(gen)
    query = topics / np.linalg.norm(topics, axis=1, keepdims=True)
    idf = IdfTable(doc_count=100, df={t: int(gen.integers(1, 90)) for t in range(50)})

    ratio = 0.33
    c = budget(doc.length, ratio)
    print(f"document: {doc.length} rows; ratio {ratio} -> budget {c} rows\n")

    baseline = compress_document(doc, CompressionConfig(method="none"))
    base_score = maxsim(query, baseline.embeddings)
    print(f"{'method':18s} {'rows':>4s} {'score':>8s} {'vs none':>8s}  provenance sizes")
    for method in METHODS:
        cfg = CompressionConfig(method=method, ratio=ratio, seed=11)
        out = compress_document(doc, cfg, idf=idf)
        score = maxsim(query, out.embeddings)
        sizes = ",".join(str(len(g)) for g in out.provenance)
        print(f"{method:18s} {out.rows:4d} {score:8.4f} {score / base_score:8.4f}  [{sizes}]")

    print("\npooling keeps duplicated topics (score ratio near 1.0);")
    print("pruning at the same budget usually loses one.")


if __name__ == "__main__":
    main()
