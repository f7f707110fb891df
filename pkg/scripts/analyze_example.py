"""Run the full feedback pipeline on the bundled example program and print both
renderings. Handy for eyeballing report changes while editing rules or prompts."""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from stylefeed.config import EngineConfig
from stylefeed.orchestrator import MockTransport
from stylefeed.pipeline import generate_report
from stylefeed.program_facts import SourceProgram, facts_to_dict, parse_program
from stylefeed.report import render_text, report_to_dict

EXAMPLE = Path(__file__).parent.parent / "tests" / "data" / "mars_weight.py"


def main() -> int:
    path = Path(sys.argv[1]) if len(sys.argv) > 1 else EXAMPLE
    source = SourceProgram(text=path.read_text(encoding="utf-8"), problem_id=path.name)
    print("== parsed facts ==")
    print(json.dumps(facts_to_dict(parse_program(source)), indent=2))
    report = generate_report(source, MockTransport(), EngineConfig(),
                             datetime.now(timezone.utc))
    print("\n== rendered report ==")
    print(render_text(report))
    print("== canonical JSON ==")
    print(json.dumps(report_to_dict(report), indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
