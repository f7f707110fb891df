"""Desk-scale cohort simulation: a synthetic week of feedback requests.

Assigns a synthetic cohort to experiment groups, scripts requests and views
against the service with an injected clock, and prints per-group view rates.
The behavioral model is deliberately simple (real-time students view what they
can see, nudged students view more often); the point is exercising the gating,
release, and logging machinery end to end, not predicting humans.
"""

from __future__ import annotations

import argparse
import random
import tempfile
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path

from stylefeed.clock import ManualClock
from stylefeed.config import EngineConfig
from stylefeed.orchestrator import MockTransport
from stylefeed.service import Group, StyleFeedbackService

PROGRAM = (
    "def main():\n"
    "    raw = input(\"grams:\")\n"
    "    g = float(raw)\n"
    "    t = g * 28.35\n"
    "    print(t)\n"
)

VIEW_CHANCE = {Group.DELAY: 0.35, Group.REAL_TIME: 0.45, Group.REAL_TIME_WITH_NUDGE: 0.85}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--students", type=int, default=300)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--log-path", default=None)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    log_path = Path(args.log_path) if args.log_path else \
        Path(tempfile.mkdtemp()) / "cohort-events.jsonl"
    clock = ManualClock(datetime(2026, 1, 6, 9, 0, tzinfo=timezone.utc))  # Tuesday
    service = StyleFeedbackService(EngineConfig(seed=args.seed), MockTransport(),
                                   clock=clock, log_path=log_path)

    report_ids: dict[str, str] = {}
    for i in range(args.students):
        student = f"sim-{i}"
        clock.advance(rng.randint(5, 40))
        stored = service.request_style_feedback(student, "p1", PROGRAM, True)
        report_ids[student] = stored.report_id

    # during the week only visible (real-time) reports can be viewed
    viewed: set[str] = set()
    for student, report_id in report_ids.items():
        group = service._sessions[(student, "p1")].group
        if group is Group.DELAY:
            continue
        if rng.random() < VIEW_CHANCE[group]:
            service.record_view(student, report_id)
            viewed.add(student)

    # Monday release: delayed students who come back can finally view
    clock.set(datetime(2026, 1, 12, 8, 0, tzinfo=timezone.utc))
    for student, report_id in report_ids.items():
        group = service._sessions[(student, "p1")].group
        if group is Group.DELAY and rng.random() < VIEW_CHANCE[group]:
            service.record_view(student, report_id)
            viewed.add(student)

    totals: Counter[Group] = Counter()
    viewers: Counter[Group] = Counter()
    for student in report_ids:
        group = service._sessions[(student, "p1")].group
        totals[group] += 1
        if student in viewed:
            viewers[group] += 1

    print(f"cohort of {args.students} students, event log: {log_path}")
    print(f"{'group':<20}{'students':>10}{'viewed':>10}{'view rate':>12}")
    for group in (Group.DELAY, Group.REAL_TIME, Group.REAL_TIME_WITH_NUDGE):
        n, v = totals[group], viewers[group]
        rate = v / n if n else 0.0
        print(f"{group.value:<20}{n:>10}{v:>10}{rate:>12.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
