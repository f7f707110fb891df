"""Operator entry points: analyze one file, serve the API, replay trace logs.

Exit codes: 0 success, 1 unparseable student program, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime
from pathlib import Path

from .analytics import load_traces_jsonl, render_metrics_table, trace_metrics
from .clock import ManualClock, SystemClock
from .config import ConfigError, load_config
from .orchestrator import TransportError, make_transport
from .pipeline import generate_report
from .program_facts import SourceProgram
from .report import render_text, report_to_dict

EXIT_OK = 0
EXIT_SYNTAX = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stylefeed",
                                     description="Real-time style feedback engine")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="produce a style report for one file")
    analyze.add_argument("path", help="Python source file to analyze")
    analyze.add_argument("--transport", choices=("mock", "live"), default="mock")
    analyze.add_argument("--format", choices=("text", "json"), default="text")
    analyze.add_argument("--config", default=None, help="JSON config file")
    analyze.add_argument("--now", default=None,
                         help="ISO timestamp to stamp the report with (testing hook)")

    serve = sub.add_parser("serve", help="run the feedback service")
    serve.add_argument("--config", default=None)
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--transport", choices=("mock", "live"), default=None,
                       help="override the transport named in the config")
    serve.add_argument("--seed", type=int, default=None,
                       help="override the group-assignment seed")
    serve.add_argument("--log-path", default="stylefeed-events.jsonl",
                       help="append-only event log file")

    metrics = sub.add_parser("metrics", help="summarize edit traces")
    metrics.add_argument("path", help="JSONL file with one snapshot trace per line")
    metrics.add_argument("--format", choices=("text", "json"), default="text")

    return parser


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"stylefeed: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    source_path = Path(args.path)
    try:
        text = source_path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"stylefeed: cannot read {source_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        transport = make_transport(args.transport, timeout=config.request_timeout)
    except (TransportError, ValueError) as exc:
        print(f"stylefeed: transport not configured: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    clock = ManualClock(datetime.fromisoformat(args.now)) if args.now else SystemClock()
    try:
        source = SourceProgram(text=text, problem_id=source_path.name)
        report = generate_report(source, transport, config, clock.now())
    except (SyntaxError, ValueError) as exc:
        print(f"stylefeed: cannot analyze {source_path}: {exc}", file=sys.stderr)
        return EXIT_SYNTAX

    if args.format == "json":
        print(json.dumps(report_to_dict(report), indent=2))
    else:
        print(render_text(report), end="")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from dataclasses import replace

    import uvicorn

    from .api import create_app
    from .service import StyleFeedbackService

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"stylefeed: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.transport:
        config = replace(config, transport=args.transport)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    try:
        transport = make_transport(config.transport, timeout=config.request_timeout)
    except (TransportError, ValueError) as exc:
        print(f"stylefeed: transport not configured: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log_path = Path(args.log_path)
    if log_path.exists():
        service = StyleFeedbackService.replay(log_path, config, transport)
    else:
        service = StyleFeedbackService(config, transport, log_path=log_path)
    uvicorn.run(create_app(service), host=args.host, port=args.port)
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    path = Path(args.path)
    if not path.exists():
        print(f"stylefeed: no such trace file: {path}", file=sys.stderr)
        return EXIT_CONFIG
    traces, skipped = load_traces_jsonl(path)
    if skipped:
        print(f"stylefeed: skipped {skipped} corrupt trace line(s)", file=sys.stderr)
    summary = trace_metrics(traces)
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        print(render_metrics_table(summary), end="")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return cmd_analyze(args)
    if args.command == "serve":
        return cmd_serve(args)
    return cmd_metrics(args)


if __name__ == "__main__":
    sys.exit(main())
