"""Command-line interface: `mvseq-export docs|queries`.

Exit codes match the retrieval pipeline's CLI: 0 success, 1 usage error,
2 data/model error.  Each command prints a one-object JSON summary to
standard output on success.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ExportConfig
from .export import export_documents, export_queries


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors -> exit code 1
        raise SystemExit((message, 1))


def build_parser() -> _Parser:
    parser = _Parser(prog="mvseq-export", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser, default_max_length: int):
        p.add_argument("--model", required=True,
                       help="checkpoint path or hub identifier")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--dataset",
                         help="local BEIR-layout dataset directory")
        src.add_argument("--jsonl", nargs="+", metavar="FILE",
                         help='JSONL files of {"_id": ..., "text": ...} lines')
        p.add_argument("--out", required=True, help="output corpus directory")
        p.add_argument("--max-length", type=int, default=default_max_length)
        p.add_argument("--batch-size", type=int, default=16)
        p.add_argument("--device", default="cpu")

    docs = sub.add_parser("docs", help="export document embeddings + "
                          "token ids + attention totals")
    common(docs, default_max_length=300)

    queries = sub.add_parser("queries", help="export query embeddings "
                             "(and TREC qrels for BEIR datasets)")
    common(queries, default_max_length=32)
    queries.add_argument("--split", default="test",
                         help="qrels split to convert (BEIR datasets)")
    return parser


def _config(args: argparse.Namespace) -> ExportConfig:
    kwargs = dict(
        model=args.model,
        output_dir=args.out,
        dataset_dir=args.dataset,
        jsonl_paths=tuple(args.jsonl or ()),
        batch_size=args.batch_size,
        device=args.device,
    )
    if args.command == "docs":
        kwargs["doc_max_length"] = args.max_length
    else:
        kwargs["query_max_length"] = args.max_length
        kwargs["qrels_split"] = args.split
    return ExportConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, tuple):
            message, code = exc.code
            print(f"mvseq-export: {message}", file=sys.stderr)
            return code
        return 0 if exc.code in (0, None) else int(exc.code)

    try:
        config = _config(args)
        if args.command == "docs":
            summary = export_documents(config)
        else:
            summary = export_queries(config)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"mvseq-export: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
