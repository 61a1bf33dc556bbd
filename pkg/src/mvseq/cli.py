"""Command-line interface: compress, search, eval, and ratio sweeps.

Exit codes: 0 success, 1 usage error, 2 data error.  The sweep report CSV
contains only deterministic columns, so reruns with the same seed are
byte-identical; wall-clock timings go to a sibling `.timings.csv`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from .compress import METHODS, CompressionConfig, CompressionError, compress_corpus
from .corpus import CorpusFormatError, read_corpus
from .importance import IdfTable, build_idf_table
from .metrics import evaluate_run, load_qrels, read_run, write_run
from .retrieval import search
from .rng import stream_key

SWEEP_METHODS = tuple(m for m in METHODS if m != "none")
DEFAULT_RATIOS = (0.10, 0.20, 0.33, 0.50, 0.75)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract reserves 2 for
    # data errors and 1 for usage.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit((self.prog + ": error: " + message, 1))


def _ratio_arg(text: str) -> float:
    value = float(text)
    if not (0.0 < value <= 1.0):
        raise argparse.ArgumentTypeError(f"ratio must be in (0, 1], got {text}")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="mvseq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a corpus directory")
    p.add_argument("--input", required=True, help="input corpus directory")
    p.add_argument("--output", required=True, help="output corpus directory")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--ratio", type=_ratio_arg, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--idf-table", help="JSON IDF table (else built from the corpus)")
    p.add_argument("--kmeans-iters", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("search", help="exhaustive MaxSim search, TREC run output")
    p.add_argument("--docs", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("-k", type=int, default=100)
    p.add_argument("--run", required=True, help="output run file path")
    p.add_argument("--tag", default="mvseq")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="score a run file against qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--k-ndcg", type=int, default=10)
    p.add_argument("--k-recall", type=int, default=100)
    p.add_argument("--gain", choices=("linear", "exp"), default="linear")
    p.add_argument("--csv", help="also write the report as a CSV row to this path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="compress/search/eval across methods and ratios")
    p.add_argument("--docs", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--methods", nargs="+", choices=SWEEP_METHODS, default=list(SWEEP_METHODS))
    p.add_argument("--ratios", nargs="+", type=_ratio_arg, default=list(DEFAULT_RATIOS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True, help="output CSV path")
    p.add_argument("--dataset", help="dataset label for the report (default: docs dir name)")
    p.add_argument("--work", help="work dir for intermediate corpora and runs "
                                  "(default: $MVSEQ_WORKDIR or a temp dir)")
    p.add_argument("--search-k", type=int, default=100)
    p.add_argument("--k-ndcg", type=int, default=10)
    p.add_argument("--k-recall", type=int, default=100)
    p.add_argument("--kmeans-iters", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--keep-going", action="store_true",
                   help="skip failing (method, ratio) cells instead of aborting")
    p.add_argument("--keep-work", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def cmd_compress(args) -> int:
    corpus = read_corpus(args.input)
    idf = IdfTable.load(args.idf_table) if args.idf_table else None
    config = CompressionConfig(
        method=args.method,
        ratio=args.ratio,
        seed=args.seed,
        kmeans_max_iters=args.kmeans_iters,
    )
    summary = compress_corpus(corpus, config, args.output, idf=idf, jobs=args.jobs)
    print(json.dumps(summary))
    return 0


def cmd_search(args) -> int:
    docs = read_corpus(args.docs)
    queries = read_corpus(args.queries)
    run = search(queries, docs, k=args.k)
    write_run(run, args.run, tag=args.tag)
    return 0


def cmd_eval(args) -> int:
    run = read_run(args.run)
    qrels = load_qrels(args.qrels)
    report = evaluate_run(run, qrels, k_ndcg=args.k_ndcg, k_recall=args.k_recall,
                          gain=args.gain)
    print(json.dumps(report.to_dict()))
    if args.csv:
        Path(args.csv).write_text(
            report.csv_header() + "\n" + report.csv_row() + "\n", encoding="utf-8"
        )
    return 0


def _sweep_cell(docs, queries, qrels, method, ratio, seed, cell_dir, args):
    """Compress into cell_dir, search, evaluate. Returns (report, row stats)."""
    cell_dir.mkdir(parents=True, exist_ok=True)
    corpus_dir = cell_dir / "corpus"
    config = CompressionConfig(
        method=method,
        ratio=ratio,
        seed=stream_key(seed, method, f"{ratio:g}"),
        kmeans_max_iters=args.kmeans_iters,
    )
    summary = compress_corpus(docs, config, corpus_dir, jobs=args.jobs,
                              idf=getattr(args, "_idf_table", None))
    t0 = time.perf_counter()
    run = search(queries, read_corpus(corpus_dir), k=args.search_k)
    search_time = time.perf_counter() - t0
    write_run(run, cell_dir / "run.trec", tag=f"mvseq-{method}")
    report = evaluate_run(run, qrels, k_ndcg=args.k_ndcg, k_recall=args.k_recall)
    return report, summary, search_time


def cmd_sweep(args) -> int:
    docs = read_corpus(args.docs)
    queries = read_corpus(args.queries)
    qrels = load_qrels(args.qrels)
    dataset = args.dataset or Path(args.docs).name

    work_root = args.work or os.environ.get("MVSEQ_WORKDIR")
    cleanup = None
    if work_root is None and not args.keep_work:
        cleanup = tempfile.TemporaryDirectory(prefix="mvseq-sweep-")
        work_root = cleanup.name
    elif work_root is None:
        work_root = tempfile.mkdtemp(prefix="mvseq-sweep-")
    work = Path(work_root)

    if any(m.endswith("_idf") for m in args.methods):
        args._idf_table = build_idf_table(docs)
    else:
        args._idf_table = None

    header = (
        f"dataset,method,ratio,achieved_ratio,mean_tokens_per_doc,"
        f"ndcg_at_{args.k_ndcg},recall_at_{args.k_recall},relative_ndcg,relative_recall"
    )
    timing_header = "dataset,method,ratio,compress_wall_time,search_wall_time"
    rows: list[str] = []
    timing_rows: list[str] = []

    def add_row(method, ratio, report, summary, search_time, base_ndcg, base_recall):
        rel_ndcg = report.mean_ndcg / base_ndcg if base_ndcg else float("nan")
        rel_recall = report.mean_recall / base_recall if base_recall else float("nan")
        if method == "none":
            rel_ndcg = rel_recall = 1.0
        mean_tokens = summary["output_tokens"] / summary["docs"]
        rows.append(
            f"{dataset},{method},{ratio:g},{summary['achieved_ratio']:.6f},"
            f"{mean_tokens:.4f},{report.mean_ndcg:.6f},{report.mean_recall:.6f},"
            f"{rel_ndcg:.6f},{rel_recall:.6f}"
        )
        timing_rows.append(
            f"{dataset},{method},{ratio:g},{summary['wall_time']:.3f},{search_time:.3f}"
        )

    try:
        base_report, base_summary, base_search_time = _sweep_cell(
            docs, queries, qrels, "none", 1.0, args.seed, work / "none" / "1", args
        )
        add_row("none", 1.0, base_report, base_summary, base_search_time, 0.0, 0.0)
        for method in args.methods:
            for ratio in args.ratios:
                cell_dir = work / method / f"{ratio:g}"
                try:
                    report, summary, search_time = _sweep_cell(
                        docs, queries, qrels, method, ratio, args.seed, cell_dir, args
                    )
                except Exception as exc:
                    if args.keep_going:
                        print(f"sweep cell ({method}, {ratio:g}) failed: {exc}",
                              file=sys.stderr)
                        continue
                    raise RuntimeError(f"sweep cell ({method}, {ratio:g}): {exc}") from exc
                add_row(method, ratio, report, summary, search_time,
                        base_report.mean_ndcg, base_report.mean_recall)

        report_path = Path(args.report)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
        timings_path = report_path.with_suffix(".timings.csv")
        timings_path.write_text(
            "\n".join([timing_header] + timing_rows) + "\n", encoding="utf-8"
        )
        print(json.dumps({"rows": len(rows), "report": str(report_path),
                          "timings": str(timings_path)}))
    finally:
        if cleanup is not None:
            cleanup.cleanup()
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, tuple):
            message, code = exc.code
            print(message, file=sys.stderr)
            return code
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError,
            CorpusFormatError, CompressionError) as exc:
        print(f"mvseq: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
