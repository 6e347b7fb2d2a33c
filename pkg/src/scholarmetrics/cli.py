"""Batch driver: ingest, analyze, summarize and serve without the HTTP
service. Outputs are byte-identical to the library and service for the
same inputs.

Exit codes: 0 ok, 1 usage error, 2 data error. Diagnostics go to stderr.
"""

import argparse
import json
import sys
from pathlib import Path

from . import bibtrail, ingest, ops, summarize, viz
from .corpus import FilterSpec, filter_corpus
from .errors import ScholarmetricsError
from .result import AnalysisResult

EXIT_USAGE = 1
EXIT_DATA = 2

_KIND_ALIASES = {"scopus": "scopus", "wos": "wos", "csv": "generic_csv",
                 "generic_csv": "generic_csv"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="scholarmetrics",
                     description="Bibliometric/scientometric analysis of "
                                 "Scopus and Web of Science exports")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse, merge and deduplicate export files")
    p_ingest.add_argument("files", nargs="+")
    p_ingest.add_argument("--kind", choices=sorted(_KIND_ALIASES), default="scopus")
    p_ingest.add_argument("--out", required=True, help="canonical corpus CSV path")
    p_ingest.add_argument("--report", help="dedup report JSON path "
                                           "(default: <out>.report.json)")

    p_an = sub.add_parser("analyze", help="run one analysis over a corpus CSV")
    p_an.add_argument("corpus", help="canonical corpus CSV from ingest")
    p_an.add_argument("--module", required=True,
                      choices=["bibtrail", "scitrace", "colabrix", "themantix"])
    p_an.add_argument("--op", required=True, help="operation name; see --list-ops")
    p_an.add_argument("--mode", help="operation mode where applicable")
    p_an.add_argument("--params", help="extra operation parameters as JSON object")
    p_an.add_argument("--filter", dest="filter_path", help="FilterSpec JSON file")
    p_an.add_argument("--scimago", help="Scimago CSV for journal quartile modes")
    p_an.add_argument("--csv", dest="csv_path", help="write result CSV here")
    p_an.add_argument("--json", dest="json_path", help="write result JSON here")
    p_an.add_argument("--svg", dest="svg_path", help="render chart SVG here")
    p_an.add_argument("--chart-options", dest="chart_options",
                      help="ChartOptions JSON file for --svg")
    p_an.add_argument("--background", choices=["white", "transparent"], default="white")

    p_sum = sub.add_parser("summarize", help="summarize an exported result CSV")
    p_sum.add_argument("result", help="result CSV produced by analyze --csv")
    p_sum.add_argument("--provider", default="fallback",
                       help="'fallback' or a summary endpoint URL")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--data-dir", default=None)

    p_ops = sub.add_parser("list-ops", help="list module/operation names")
    del p_ops
    return parser


def _cmd_ingest(args) -> int:
    record_lists = []
    kind = _KIND_ALIASES[args.kind]
    for path in args.files:
        data = Path(path).read_bytes()
        table = ingest.parse_delimited(data, kind, source_label=Path(path).stem)
        mapping = ingest.infer_field_mapping(table)
        record_lists.append(ingest.apply_mapping(table, mapping))
    corpus, report = ingest.merge_and_dedup(record_lists)
    Path(args.out).write_bytes(ingest.corpus_to_csv(corpus))
    report_path = Path(args.report) if args.report else Path(str(args.out) + ".report.json")
    report_path.write_text(json.dumps(report.to_dict(), indent=1, sort_keys=True), "utf-8")
    print(f"wrote {len(corpus)} records to {args.out} "
          f"({report.input_count - report.kept} duplicates dropped)", file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    corpus = ingest.corpus_from_csv(Path(args.corpus).read_bytes())
    if args.filter_path:
        spec = FilterSpec.from_json(Path(args.filter_path).read_text("utf-8"))
        corpus = filter_corpus(corpus, spec)
    params = json.loads(args.params) if args.params else {}
    if args.mode is not None:
        params.setdefault("mode", args.mode)
    context = {}
    if args.scimago:
        context["quartile_index"] = bibtrail.load_scimago(Path(args.scimago).read_bytes())
    value = ops.run_operation(args.module, args.op, corpus, params, context)
    obj = ops.to_json_obj(value)

    if args.json_path:
        Path(args.json_path).write_bytes(ops.canonical_json(obj))
    if args.csv_path:
        Path(args.csv_path).write_bytes(ops.to_csv_bytes(obj))
    if args.svg_path:
        if obj.get("type") != "table":
            raise ScholarmetricsError("--svg applies to table results")
        options = viz.ChartOptions.from_dict(
            json.loads(Path(args.chart_options).read_text("utf-8"))
            if args.chart_options else
            {"chart_type": viz.chart_compatibility(obj["kind"])[0]})
        spec = viz.build_chart_spec(AnalysisResult.from_dict(obj), options)
        Path(args.svg_path).write_bytes(viz.render_svg(spec, background=args.background))
    if not (args.json_path or args.csv_path or args.svg_path):
        sys.stdout.write(ops.canonical_json(obj).decode("utf-8") + "\n")
    return 0


def _cmd_summarize(args) -> int:
    data = Path(args.result).read_bytes()
    result = viz.result_from_csv(data)
    provider = None
    if args.provider != "fallback":
        provider = summarize.HttpSummaryProvider(args.provider)
    outcome = summarize.generate_summary(result, provider=provider)
    print(outcome.text)
    print(f"[provider: {outcome.provider}]", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "summarize":
            return _cmd_summarize(args)
        if args.command == "list-ops":
            for name in ops.list_operations():
                print(name)
            return 0
        if args.command == "serve":
            from . import service
            service.run(host=args.host, port=args.port, data_dir=args.data_dir)
            return 0
    except ScholarmetricsError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"usage error: unknown command {args.command!r}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
