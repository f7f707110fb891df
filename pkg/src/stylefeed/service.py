"""Session state around the feedback pipeline: functionality gate, cooldown,
experiment groups, delayed release, views and ratings, and an append-only
event log that can rebuild the whole state by replay."""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, time, timedelta
from enum import Enum
from pathlib import Path
from zoneinfo import ZoneInfo

from .clock import Clock, SystemClock
from .config import EngineConfig, GroupWeights, ReleaseSchedule
from .orchestrator import Transport
from .pipeline import generate_report
from .program_facts import SourceProgram
from .report import FeedbackReport, report_from_dict, report_to_dict


class Group(str, Enum):
    DELAY = "Delay"
    REAL_TIME = "RealTime"
    REAL_TIME_WITH_NUDGE = "RealTimeWithNudge"


class ServiceError(Exception):
    pass


class GateClosed(ServiceError):
    """Style feedback unlocks only after all functionality tests pass."""


class CooldownActive(ServiceError):
    def __init__(self, remaining_seconds: float):
        super().__init__(f"feedback available again in {remaining_seconds:.0f} s")
        self.remaining_seconds = remaining_seconds


class UnknownSession(ServiceError):
    pass


class UnknownReport(ServiceError):
    pass


class NotVisible(ServiceError):
    """Report exists but its release instant has not arrived."""


class InvalidSource(ServiceError):
    def __init__(self, line: int | None, message: str):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class PipelineError(ServiceError):
    pass


def assign_group(student_id: str, weights: GroupWeights, seed: int) -> Group:
    """Deterministic group draw: stable hash of (seed, student) into [0, 1)."""
    digest = hashlib.sha256(f"{seed}:{student_id}".encode("utf-8")).hexdigest()
    u = int(digest[:16], 16) / 2**64
    if u < weights.delay:
        return Group.DELAY
    if u < weights.delay + weights.realtime:
        return Group.REAL_TIME
    return Group.REAL_TIME_WITH_NUDGE


def next_release(schedule: ReleaseSchedule, now: datetime) -> datetime:
    """First release instant strictly after ``now``, in UTC."""
    tz = ZoneInfo(schedule.timezone)
    local_now = now.astimezone(tz)
    candidate = datetime.combine(
        local_now.date(), time(schedule.hour, schedule.minute), tzinfo=tz)
    days_ahead = (schedule.weekday - local_now.weekday()) % 7
    candidate += timedelta(days=days_ahead)
    if candidate <= local_now:
        candidate += timedelta(days=7)
    return candidate.astimezone(ZoneInfo("UTC"))


@dataclass(frozen=True)
class StoredReport:
    report_id: str
    report: FeedbackReport
    visible_from: datetime


@dataclass
class SessionRecord:
    student_id: str
    problem_id: str
    group: Group
    tests_passed: bool = False
    last_request_at: datetime | None = None
    stored_reports: list[StoredReport] = field(default_factory=list)
    # report_id -> (helpful, rated_at); re-rating overwrites, count unchanged
    ratings: dict[str, tuple[bool, datetime]] = field(default_factory=dict)
    views: list[tuple[str, datetime]] = field(default_factory=list)


class StyleFeedbackService:
    """Materialized session state plus the append-only event log behind it.

    Mutations for one (student, problem) key are serialized; every accepted
    mutation is appended to the log before the in-memory view changes, so
    replaying the log reconstructs the exact same state.
    """

    def __init__(self, config: EngineConfig, transport: Transport,
                 clock: Clock | None = None, log_path: str | Path | None = None):
        self.config = config
        self.transport = transport
        self.clock = clock or SystemClock()
        self.log_path = Path(log_path) if log_path is not None else None
        self._sessions: dict[tuple[str, str], SessionRecord] = {}
        self._reports: dict[str, tuple[str, str]] = {}  # report_id -> session key
        self._lock = threading.Lock()
        self._key_locks: dict[tuple[str, str], threading.Lock] = {}

    # --- internals -----------------------------------------------------------

    def _key_lock(self, key: tuple[str, str]) -> threading.Lock:
        with self._lock:
            return self._key_locks.setdefault(key, threading.Lock())

    def _append_event(self, event_type: str, at: datetime, student_id: str,
                      problem_id: str, payload: dict) -> None:
        if self.log_path is None:
            return
        record = {
            "event_type": event_type,
            "at": at.isoformat(),
            "student_id": student_id,
            "problem_id": problem_id,
            "payload": payload,
        }
        with self._lock:
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")

    def _session(self, student_id: str, problem_id: str) -> SessionRecord:
        session = self._sessions.get((student_id, problem_id))
        if session is None:
            raise UnknownSession(f"no session for {student_id}/{problem_id}")
        return session

    def _owned_report(self, report_id: str) -> tuple[SessionRecord, StoredReport]:
        key = self._reports.get(report_id)
        if key is None:
            raise UnknownReport(report_id)
        session = self._sessions[key]
        for stored in session.stored_reports:
            if stored.report_id == report_id:
                return session, stored
        raise UnknownReport(report_id)

    def report_owner(self, report_id: str) -> str:
        """Student id owning a report; raises UnknownReport."""
        session, _ = self._owned_report(report_id)
        return session.student_id

    # --- operations ------------------------------------------------------------

    def request_style_feedback(self, student_id: str, problem_id: str,
                               source_text: str, tests_passed: bool,
                               now: datetime | None = None) -> StoredReport:
        now = now or self.clock.now()
        key = (student_id, problem_id)
        with self._key_lock(key):
            if not tests_passed:
                raise GateClosed("pass all functionality tests first")

            session = self._sessions.get(key)
            if session is None:
                group = assign_group(student_id, self.config.weights, self.config.seed)
                session = SessionRecord(student_id=student_id, problem_id=problem_id,
                                        group=group)
            if session.last_request_at is not None:
                elapsed = (now - session.last_request_at).total_seconds()
                if elapsed < self.config.cooldown_seconds:
                    raise CooldownActive(self.config.cooldown_seconds - elapsed)

            try:
                source = SourceProgram(text=source_text, problem_id=problem_id)
                report = generate_report(source, self.transport, self.config, now)
            except (SyntaxError, ValueError) as exc:
                line = getattr(exc, "lineno", None)
                raise InvalidSource(line, str(exc)) from exc
            except Exception as exc:  # degradation already failed inside the pipeline
                raise PipelineError(str(exc)) from exc

            if session.group is Group.DELAY:
                visible_from = next_release(self.config.release, now)
            else:
                visible_from = now
            report_id = f"{student_id}/{problem_id}/{len(session.stored_reports) + 1}"
            stored = StoredReport(report_id=report_id, report=report,
                                  visible_from=visible_from)

            self._append_event("feedback_accepted", now, student_id, problem_id, {
                "report_id": report_id,
                "group": session.group.value,
                "visible_from": visible_from.isoformat(),
                "report": report_to_dict(report),
            })
            session.tests_passed = True
            session.last_request_at = now
            session.stored_reports.append(stored)
            self._sessions[key] = session
            self._reports[report_id] = key
            return stored

    def get_visible_reports(self, student_id: str, problem_id: str,
                            now: datetime | None = None
                            ) -> tuple[list[StoredReport], bool, datetime | None]:
        """Visible reports newest first, the nudge flag, and the next pending
        release instant (None when nothing is withheld)."""
        now = now or self.clock.now()
        session = self._session(student_id, problem_id)
        visible = [s for s in session.stored_reports if s.visible_from <= now]
        visible.sort(key=lambda s: s.visible_from, reverse=True)
        pending = [s.visible_from for s in session.stored_reports if s.visible_from > now]

        nudge = False
        if session.group is Group.REAL_TIME_WITH_NUDGE:
            viewed = {report_id for report_id, _ in session.views}
            nudge = any(s.report_id not in viewed for s in visible)
        return visible, nudge, min(pending) if pending else None

    def record_view(self, student_id: str, report_id: str,
                    now: datetime | None = None) -> None:
        now = now or self.clock.now()
        session, stored = self._owned_report(report_id)
        if session.student_id != student_id:
            raise UnknownReport(report_id)
        with self._key_lock((session.student_id, session.problem_id)):
            if stored.visible_from > now:
                raise NotVisible(report_id)
            self._append_event("view_recorded", now, session.student_id,
                               session.problem_id, {"report_id": report_id})
            session.views.append((report_id, now))

    def record_rating(self, student_id: str, report_id: str, helpful: bool,
                      now: datetime | None = None) -> None:
        now = now or self.clock.now()
        session, stored = self._owned_report(report_id)
        if session.student_id != student_id:
            raise UnknownReport(report_id)
        with self._key_lock((session.student_id, session.problem_id)):
            if stored.visible_from > now:
                raise NotVisible(report_id)
            self._append_event("rating_recorded", now, session.student_id,
                               session.problem_id,
                               {"report_id": report_id, "helpful": helpful})
            session.ratings[report_id] = (helpful, now)

    # --- replay ---------------------------------------------------------------

    def apply_event(self, record: dict) -> None:
        """Apply one logged event to the in-memory view (no re-logging)."""
        at = datetime.fromisoformat(record["at"])
        student_id = record["student_id"]
        problem_id = record["problem_id"]
        payload = record["payload"]
        key = (student_id, problem_id)
        if record["event_type"] == "feedback_accepted":
            session = self._sessions.get(key)
            if session is None:
                session = SessionRecord(student_id=student_id, problem_id=problem_id,
                                        group=Group(payload["group"]))
                self._sessions[key] = session
            stored = StoredReport(
                report_id=payload["report_id"],
                report=report_from_dict(payload["report"]),
                visible_from=datetime.fromisoformat(payload["visible_from"]),
            )
            session.tests_passed = True
            session.last_request_at = at
            session.stored_reports.append(stored)
            self._reports[stored.report_id] = key
        elif record["event_type"] == "view_recorded":
            self._sessions[key].views.append((payload["report_id"], at))
        elif record["event_type"] == "rating_recorded":
            self._sessions[key].ratings[payload["report_id"]] = (payload["helpful"], at)

    @classmethod
    def replay(cls, log_path: str | Path, config: EngineConfig, transport: Transport,
               clock: Clock | None = None) -> "StyleFeedbackService":
        """Rebuild a service's state from its event log. Corrupt lines are skipped."""
        service = cls(config, transport, clock=clock, log_path=None)
        path = Path(log_path)
        if path.exists():
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    continue
                service.apply_event(record)
        service.log_path = path
        return service
