"""Regenerate metric_cases.json: randomized nDCG/recall cases with expected
values frozen from an independent evaluator.

nDCG@10 comes from sklearn.metrics.ndcg_score over a doc universe of every
judged or retrieved document.  Runs are always at least 10 deep and filler
(non-retrieved) docs get strictly lower scores, so sklearn's top-10 equals
the run's top-10 and its full-universe ideal DCG equals the all-judgments
ideal.  Scores are drawn without ties, keeping sklearn's tie-averaging inert.
Recall@100 is recomputed here by plain set counting.

Run from the repository root:  python3 tests/data/gen_metric_cases.py
"""

import json
from pathlib import Path

import numpy as np
from sklearn.metrics import ndcg_score


def one_case(case_id: int) -> dict:
    gen = np.random.default_rng(7000 + case_id)
    n_docs = int(gen.integers(12, 30))
    doc_ids = [f"d{j:02d}" for j in range(n_docs)]

    while True:
        grades = {d: int(g) for d, g in
                  zip(doc_ids, gen.choice([0, 0, 0, 1, 1, 2, 3], size=n_docs))
                  if gen.random() < 0.8}
        if any(g > 0 for g in grades.values()):
            break

    depth = int(gen.integers(10, n_docs + 1))
    retrieved = list(gen.choice(doc_ids, size=depth, replace=False))
    scores = np.sort(gen.random(depth))[::-1] * 10.0  # distinct w.p. 1
    run = [[d, float(s)] for d, s in zip(retrieved, scores)]

    universe = doc_ids
    y_true = np.array([[grades.get(d, 0) for d in universe]], dtype=float)
    run_scores = dict(run)
    floor = min(run_scores.values()) - 1.0
    y_score = np.array([[run_scores.get(d, floor - i) for i, d in
                         enumerate(universe)]])
    expected_ndcg = float(ndcg_score(y_true, y_score, k=10))

    relevant = {d for d, g in grades.items() if g > 0}
    in_top = {d for d, _ in run[:100]}
    expected_recall = len(relevant & in_top) / len(relevant)

    return {
        "qrels": grades,
        "run": run,
        "ndcg_at_10": expected_ndcg,
        "recall_at_100": expected_recall,
    }


def main():
    cases = [one_case(i) for i in range(20)]
    out = Path(__file__).parent / "metric_cases.json"
    out.write_text(json.dumps(cases, indent=1))
    print(f"wrote {len(cases)} cases to {out}")


if __name__ == "__main__":
    main()
