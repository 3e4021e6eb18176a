"""Command-line interface.

    kcat serve --config kcat.toml
    kcat stats --kb DIR --corpus FILE [--predictions FILE]
    kcat manage matrix FILES...
    kcat manage errors --kb DIR --gold FILE --pred FILE --corpus FILE -o OUT
    kcat manage integrate --kb DIR FILES... -o OUT

All failures print a diagnostic to stderr and exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analytics
from .config import load_config
from .corpus import load_corpus
from .errors import KcatError
from .kb import load_kb_dir
from .linker import generate_candidates, import_predictions, reduction_stats


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kcat",
        description="Knowledge-constrained annotation engine for fine-grained entity typing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", required=True, help="path to the TOML config file")

    stats = sub.add_parser("stats", help="print the candidate-type reduction report")
    stats.add_argument("--kb", required=True, help="directory with the three KB files")
    stats.add_argument("--corpus", required=True, help="corpus JSON file")
    stats.add_argument("--predictions", help="precomputed linker output (JSON lines)")
    stats.add_argument("--k-max", type=int, default=20, help="revision choices per mention")

    manage = sub.add_parser("manage", help="analyze annotation files")
    manage_sub = manage.add_subparsers(dest="manage_command", required=True)

    matrix = manage_sub.add_parser("matrix", help="pairwise accuracy matrix as JSON")
    matrix.add_argument("files", nargs="+", help="session JSON export files")

    errors = manage_sub.add_parser("errors", help="LaTeX error-analysis report")
    errors.add_argument("--kb", required=True)
    errors.add_argument("--gold", required=True, help="gold annotation export")
    errors.add_argument("--pred", required=True, help="compared annotation export")
    errors.add_argument("--corpus", required=True)
    errors.add_argument("-o", "--output", required=True, help="report destination (.tex)")

    integrate = manage_sub.add_parser("integrate", help="vote-integrate annotations")
    integrate.add_argument("--kb", required=True)
    integrate.add_argument("files", nargs="+", help="session JSON export files")
    integrate.add_argument("-o", "--output", required=True, help="final labels JSON")

    return parser


def _cmd_serve(args) -> int:
    from .service import serve  # deferred: pulls in fastapi/uvicorn

    serve(load_config(args.config))
    return 0


def _cmd_stats(args) -> int:
    kb = load_kb_dir(args.kb)
    corpus = load_corpus(args.corpus)
    predictions = {}
    if args.predictions:
        predictions = import_predictions(kb, args.predictions, args.k_max)
    css = []
    for mention in corpus.all_mentions():
        cs = predictions.get(mention.mention_id)
        if cs is None:
            cs = generate_candidates(kb, mention, args.k_max)
        css.append(cs)
    report = reduction_stats(kb, css)
    print(json.dumps(report.to_dict(), indent=2, ensure_ascii=False))
    return 0


def _cmd_matrix(args) -> int:
    files = [analytics.read_annotation_json(f) for f in args.files]
    matrix = analytics.accuracy_matrix(files)
    print(json.dumps(matrix.to_dict(), indent=2, ensure_ascii=False))
    return 0


def _cmd_errors(args) -> int:
    kb = load_kb_dir(args.kb)
    corpus = load_corpus(args.corpus)
    gold = analytics.read_annotation_json(args.gold)
    pred = analytics.read_annotation_json(args.pred)
    analytics.write_error_report(kb.hierarchy, gold, pred, corpus, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_integrate(args) -> int:
    kb = load_kb_dir(args.kb)
    files = [analytics.read_annotation_json(f) for f in args.files]
    result = analytics.integrate(kb.hierarchy, files)
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    print(f"wrote {args.output}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "manage":
            if args.manage_command == "matrix":
                return _cmd_matrix(args)
            if args.manage_command == "errors":
                return _cmd_errors(args)
            if args.manage_command == "integrate":
                return _cmd_integrate(args)
        raise AssertionError("unreachable")
    except KcatError as exc:
        print(f"kcat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
