"""Session service: gate, cooldown, group semantics, event-log replay."""

from datetime import datetime, timedelta, timezone

import pytest

from stylefeed.clock import ManualClock
from stylefeed.config import EngineConfig, GroupWeights, InvalidWeights, ReleaseSchedule
from stylefeed.orchestrator import MockTransport
from stylefeed.service import (
    CooldownActive,
    GateClosed,
    Group,
    InvalidSource,
    NotVisible,
    StyleFeedbackService,
    UnknownReport,
    UnknownSession,
    assign_group,
    next_release,
)

WEDNESDAY = datetime(2026, 1, 7, 15, 30, tzinfo=timezone.utc)
NEXT_MONDAY = datetime(2026, 1, 12, 0, 0, tzinfo=timezone.utc)

CODE = "x = 5\nprint(x)\n"


def _student_in(group: Group, seed: int = 0) -> str:
    for i in range(10_000):
        student = f"student-{i}"
        if assign_group(student, GroupWeights(), seed) is group:
            return student
    raise AssertionError(f"no student found for {group}")


def _service(tmp_path=None, seed=0, start=WEDNESDAY, **config_kwargs):
    clock = ManualClock(start)
    log_path = tmp_path / "events.jsonl" if tmp_path else None
    config = EngineConfig(seed=seed, **config_kwargs)
    return StyleFeedbackService(config, MockTransport(), clock=clock,
                                log_path=log_path), clock


# --- group assignment ----------------------------------------------------------


def test_assignment_is_deterministic():
    weights = GroupWeights()
    for student in ("alice", "bob", "carol"):
        assert assign_group(student, weights, 42) == assign_group(student, weights, 42)


def test_all_weight_on_delay():
    weights = GroupWeights(delay=1.0, realtime=0.0, nudge=0.0)
    assert all(assign_group(f"s{i}", weights, 0) is Group.DELAY for i in range(50))


def test_invalid_weights_rejected():
    with pytest.raises(InvalidWeights):
        GroupWeights(delay=0.5, realtime=0.5, nudge=0.5)
    with pytest.raises(InvalidWeights):
        GroupWeights(delay=-0.1, realtime=0.6, nudge=0.5)


def test_empirical_fractions_follow_weights():
    weights = GroupWeights(delay=0.10, realtime=0.45, nudge=0.45)
    counts = {group: 0 for group in Group}
    n = 10_000
    for i in range(n):
        counts[assign_group(f"student-{i}", weights, 1)] += 1
    assert abs(counts[Group.DELAY] / n - 0.10) <= 0.015
    assert abs(counts[Group.REAL_TIME] / n - 0.45) <= 0.015
    assert abs(counts[Group.REAL_TIME_WITH_NUDGE] / n - 0.45) <= 0.015


# --- release schedule -------------------------------------------------------------


def test_next_release_is_strictly_after_now():
    schedule = ReleaseSchedule()  # Monday 00:00 UTC
    assert next_release(schedule, WEDNESDAY) == NEXT_MONDAY
    # a request exactly at the release instant waits for the following week
    assert next_release(schedule, NEXT_MONDAY) == NEXT_MONDAY + timedelta(days=7)


def test_next_release_respects_timezone():
    schedule = ReleaseSchedule(weekday=0, hour=9, minute=0, timezone="America/New_York")
    release = next_release(schedule, WEDNESDAY)
    assert release == datetime(2026, 1, 12, 14, 0, tzinfo=timezone.utc)


# --- gate and cooldown ---------------------------------------------------------------


def test_gate_closed_without_passing_tests(tmp_path):
    service, _ = _service(tmp_path)
    with pytest.raises(GateClosed):
        service.request_style_feedback("s", "p", CODE, tests_passed=False)


def test_cooldown_rejects_at_599_accepts_at_600(tmp_path):
    service, clock = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    service.request_style_feedback(student, "p", CODE, True)

    clock.advance(599)
    with pytest.raises(CooldownActive) as err:
        service.request_style_feedback(student, "p", CODE, True)
    assert err.value.remaining_seconds == pytest.approx(1.0)

    clock.advance(1)  # exactly 600 s since the accepted request
    assert service.request_style_feedback(student, "p", CODE, True)


def test_cooldown_is_per_problem(tmp_path):
    service, _ = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    service.request_style_feedback(student, "p1", CODE, True)
    assert service.request_style_feedback(student, "p2", CODE, True)


def test_rejected_requests_do_not_touch_the_cooldown(tmp_path):
    service, clock = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    service.request_style_feedback(student, "p", CODE, True)
    clock.advance(300)
    with pytest.raises(CooldownActive):
        service.request_style_feedback(student, "p", CODE, True)
    clock.advance(300)
    assert service.request_style_feedback(student, "p", CODE, True)


def test_unparseable_source_rejected(tmp_path):
    service, _ = _service(tmp_path)
    with pytest.raises(InvalidSource):
        service.request_style_feedback("s", "p", "def broken(:\n", True)


# --- visibility and groups -------------------------------------------------------------


def test_realtime_report_visible_immediately(tmp_path):
    service, clock = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    stored = service.request_style_feedback(student, "p", CODE, True)
    assert stored.visible_from == clock.now()
    visible, nudge, pending = service.get_visible_reports(student, "p")
    assert [s.report_id for s in visible] == [stored.report_id]
    assert nudge is False
    assert pending is None


def test_delay_report_withheld_until_monday(tmp_path):
    service, clock = _service(tmp_path)
    student = _student_in(Group.DELAY)
    stored = service.request_style_feedback(student, "p", CODE, True)
    assert stored.visible_from == NEXT_MONDAY

    visible, _, pending = service.get_visible_reports(student, "p")
    assert visible == []
    assert pending == NEXT_MONDAY

    clock.set(NEXT_MONDAY)
    visible, _, pending = service.get_visible_reports(student, "p")
    assert [s.report_id for s in visible] == [stored.report_id]
    assert pending is None


def test_nudge_set_until_viewed(tmp_path):
    service, _ = _service(tmp_path)
    student = _student_in(Group.REAL_TIME_WITH_NUDGE)
    stored = service.request_style_feedback(student, "p", CODE, True)

    _, nudge, _ = service.get_visible_reports(student, "p")
    assert nudge is True
    service.record_view(student, stored.report_id)
    _, nudge, _ = service.get_visible_reports(student, "p")
    assert nudge is False


def test_group_is_immutable_across_requests(tmp_path):
    service, clock = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    service.request_style_feedback(student, "p", CODE, True)
    group_before = service._sessions[(student, "p")].group
    clock.advance(600)
    service.request_style_feedback(student, "p", CODE, True)
    assert service._sessions[(student, "p")].group is group_before


def test_unknown_session_raises(tmp_path):
    service, _ = _service(tmp_path)
    with pytest.raises(UnknownSession):
        service.get_visible_reports("ghost", "p")


# --- views and ratings -----------------------------------------------------------------


def test_view_before_release_rejected(tmp_path):
    service, _ = _service(tmp_path)
    student = _student_in(Group.DELAY)
    stored = service.request_style_feedback(student, "p", CODE, True)
    with pytest.raises(NotVisible):
        service.record_view(student, stored.report_id)
    with pytest.raises(NotVisible):
        service.record_rating(student, stored.report_id, helpful=True)


def test_two_views_are_two_events(tmp_path):
    service, _ = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    stored = service.request_style_feedback(student, "p", CODE, True)
    service.record_view(student, stored.report_id)
    service.record_view(student, stored.report_id)
    assert len(service._sessions[(student, "p")].views) == 2


def test_rating_overwrites_not_appends(tmp_path):
    service, _ = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    stored = service.request_style_feedback(student, "p", CODE, True)
    service.record_rating(student, stored.report_id, helpful=True)
    service.record_rating(student, stored.report_id, helpful=False)
    ratings = service._sessions[(student, "p")].ratings
    assert len(ratings) == 1
    assert ratings[stored.report_id][0] is False


def test_unknown_report_raises(tmp_path):
    service, _ = _service(tmp_path)
    student = _student_in(Group.REAL_TIME)
    service.request_style_feedback(student, "p", CODE, True)
    with pytest.raises(UnknownReport):
        service.record_rating(student, "nope/p/1", helpful=True)
    with pytest.raises(UnknownReport):
        service.record_view("someone-else", f"{student}/p/1")


# --- event log and replay ----------------------------------------------------------------


def _scripted_session(tmp_path):
    service, clock = _service(tmp_path)
    realtime = _student_in(Group.REAL_TIME)
    delay = _student_in(Group.DELAY)
    nudge = _student_in(Group.REAL_TIME_WITH_NUDGE)

    first = service.request_style_feedback(realtime, "p1", CODE, True)
    service.record_view(realtime, first.report_id)
    service.record_rating(realtime, first.report_id, helpful=True)
    clock.advance(700)
    service.request_style_feedback(realtime, "p1", CODE, True)
    service.request_style_feedback(delay, "p1", CODE, True)
    third = service.request_style_feedback(nudge, "p2", CODE, True)
    service.record_view(nudge, third.report_id)
    service.record_rating(nudge, third.report_id, helpful=False)
    service.record_rating(nudge, third.report_id, helpful=True)
    return service, clock


def test_replay_reconstructs_state_exactly(tmp_path):
    service, clock = _scripted_session(tmp_path)
    replayed = StyleFeedbackService.replay(tmp_path / "events.jsonl",
                                           service.config, MockTransport(),
                                           clock=clock)
    assert replayed._sessions == service._sessions
    assert replayed._reports == service._reports


def test_every_accepted_mutation_logged_once(tmp_path):
    import json as json_module

    service, _ = _scripted_session(tmp_path)
    events = [json_module.loads(line)
              for line in (tmp_path / "events.jsonl").read_text().splitlines()]
    by_type = {}
    for event in events:
        by_type[event["event_type"]] = by_type.get(event["event_type"], 0) + 1
    assert by_type == {"feedback_accepted": 4, "view_recorded": 2, "rating_recorded": 3}


def test_cooldown_safety_over_random_request_traces(tmp_path):
    # property: across any request trace, accepted requests for one
    # (student, problem) are never less than 600 s apart
    import random

    rng = random.Random(31)
    service, clock = _service(tmp_path)
    accepted: dict[tuple[str, str], list[datetime]] = {}
    students = ["ann", "bo", "cy"]
    for _ in range(300):
        clock.advance(rng.randint(1, 400))
        student = rng.choice(students)
        problem = rng.choice(["p1", "p2"])
        try:
            service.request_style_feedback(student, problem, CODE, True)
        except CooldownActive:
            continue
        accepted.setdefault((student, problem), []).append(clock.now())
    assert accepted
    for times in accepted.values():
        gaps = [(b - a).total_seconds() for a, b in zip(times, times[1:])]
        assert all(gap >= 600 for gap in gaps)


def test_replay_skips_corrupt_lines(tmp_path):
    service, clock = _scripted_session(tmp_path)
    log = tmp_path / "events.jsonl"
    content = log.read_text().splitlines()
    content.insert(1, "{ corrupt line")
    log.write_text("\n".join(content) + "\n")
    replayed = StyleFeedbackService.replay(log, service.config, MockTransport(),
                                           clock=clock)
    assert replayed._sessions == service._sessions
