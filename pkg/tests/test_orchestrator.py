"""Prompt payloads, transport retry behavior, and the response validators."""

import json

import pytest

from stylefeed.orchestrator import (
    ExhaustedRetries,
    MockTransport,
    SchemaError,
    TransportError,
    build_comment_prompt,
    build_identifier_prompt,
    make_transport,
    request_feedback,
    serialize_prompt,
    validate_comment_response,
    validate_identifier_response,
)
from stylefeed.program_facts import SourceProgram, parse_program


def _facts_and_source(text: str):
    source = SourceProgram(text=text)
    return parse_program(source), source


# --- prompt construction -----------------------------------------------------


def test_identifier_prompt_has_four_entries(mars_facts, mars_source):
    payload = build_identifier_prompt(mars_facts, mars_source)
    assert list(payload.aux_payload) == ["weight", "weight_str", "z", "s"]
    assert payload.code_text == mars_source.text
    for key in ("name", "line", "score", "misleading_type", "suggested_name", "explanation"):
        assert key in payload.schema_description


def test_identifier_prompt_on_variable_free_program():
    facts, source = _facts_and_source("print(1 + 1)\n")
    payload = build_identifier_prompt(facts, source)
    assert payload.aux_payload == {}
    assert serialize_prompt(payload)


def test_prompt_never_carries_session_fields(mars_facts, mars_source):
    student_id = "student-4711"
    for payload in (build_identifier_prompt(mars_facts, mars_source),
                    build_comment_prompt(mars_facts, mars_source)):
        text = serialize_prompt(payload)
        assert student_id not in text
        assert "student_id" not in text
        assert "group" not in text


def test_comment_prompt_maps_lines(mars_facts, mars_source):
    payload = build_comment_prompt(mars_facts, mars_source)
    assert payload.aux_payload == {"2": "ask the user for a weight on earth"}


def test_comment_prompt_commentless_schema_forbids_positive():
    facts, source = _facts_and_source("x = 1\nprint(x)\n")
    payload = build_comment_prompt(facts, source)
    assert payload.aux_payload == {}
    assert "MUST be omitted" in payload.schema_description


def test_comment_prompt_three_comments():
    facts, source = _facts_and_source("# one\nx = 1\n# two\ny = 2\nz = 3  # three\n")
    payload = build_comment_prompt(facts, source)
    assert len(payload.aux_payload) == 3


# --- transport and retries -----------------------------------------------------


def test_clean_transport_one_attempt(mars_facts, mars_source):
    result = request_feedback(build_identifier_prompt(mars_facts, mars_source),
                              MockTransport())
    assert result.attempt_count == 1
    assert json.loads(result.raw_text)


def test_garbage_twice_then_valid_three_attempts(mars_facts, mars_source):
    # retry-loop walk: attempts 1 and 2 malformed, attempt 3 valid, budget 2 retries
    transport = MockTransport(fail_times=2)
    result = request_feedback(build_identifier_prompt(mars_facts, mars_source),
                              transport, max_retries=2)
    assert result.attempt_count == 3


def test_always_failing_exhausts_retries(mars_facts, mars_source):
    transport = MockTransport(fail_times=10_000)
    with pytest.raises(ExhaustedRetries) as err:
        request_feedback(build_identifier_prompt(mars_facts, mars_source),
                         transport, max_retries=2)
    assert err.value.attempts == 3
    assert transport.calls == 3


def test_transport_error_propagates(mars_facts, mars_source):
    class Down:
        def send(self, prompt):
            raise TransportError("socket timeout")

    with pytest.raises(TransportError):
        request_feedback(build_identifier_prompt(mars_facts, mars_source), Down())


def test_fault_mode_first_call_not_json():
    transport = MockTransport(fail_times=1)
    with pytest.raises(json.JSONDecodeError):
        json.loads(transport.send("Feedback category: identifiers\n"))


def test_make_transport_live_requires_endpoint(monkeypatch):
    monkeypatch.delenv("STYLEFEED_ENDPOINT", raising=False)
    with pytest.raises(TransportError):
        make_transport("live")
    with pytest.raises(ValueError):
        make_transport("telepathy")


# --- mock transport content ------------------------------------------------------


def _mock_items(facts, source):
    raw = MockTransport().send(serialize_prompt(build_identifier_prompt(facts, source)))
    return json.loads(raw)["items"]


def test_mock_flags_single_letters_and_misleading_suffix(mars_facts, mars_source):
    items = {item["name"]: item for item in _mock_items(mars_facts, mars_source)}
    assert set(items) == {"weight_str", "z", "s"}
    assert items["weight_str"]["misleading_type"] is True
    assert items["weight_str"]["suggested_name"] == "weight_float"
    assert items["z"]["score"] <= 6
    assert items["s"]["score"] <= 6
    assert items["z"]["misleading_type"] is False


def test_mock_quiet_on_well_named_program():
    text = (
        "# greet the user politely\n"
        "def greet():\n"
        "    user_name = input(\"name:\")\n"
        "    greeting = \"hello \" + user_name\n"
        "    print(greeting)\n"
    )
    facts, source = _facts_and_source(text)
    assert _mock_items(facts, source) == []
    raw = MockTransport().send(serialize_prompt(build_comment_prompt(facts, source)))
    data = json.loads(raw)
    assert data["positive"]["line"] == 1
    assert data["suggestions"] == []


def test_mock_comment_feedback_on_worked_example(mars_facts, mars_source):
    raw = MockTransport().send(serialize_prompt(build_comment_prompt(mars_facts, mars_source)))
    data = json.loads(raw)
    assert data["positive"]["line"] == 2
    assert [s["line"] for s in data["suggestions"]] == [6]


def test_mock_omits_positive_without_comments():
    facts, source = _facts_and_source("def f():\n    return 99\n")
    raw = MockTransport().send(serialize_prompt(build_comment_prompt(facts, source)))
    assert "positive" not in json.loads(raw)


# --- identifier validation ---------------------------------------------------------


def _valid_item(**overrides):
    item = {
        "name": "weight_str",
        "line": 4,
        "score": 4,
        "misleading_type": True,
        "suggested_name": "weight_float",
        "explanation": "says what it holds",
    }
    item.update(overrides)
    return item


def test_misleading_item_retained_and_visible(mars_facts):
    raw = json.dumps({"items": [_valid_item(score=9)]})
    validation = validate_identifier_response(raw, mars_facts)
    assert len(validation.items) == 1
    assert validation.visible(6)  # misleading_type overrides the high score


def test_fabricated_name_dropped(mars_facts):
    raw = json.dumps({"items": [_valid_item(name="total_sum_of_all_values")]})
    validation = validate_identifier_response(raw, mars_facts)
    assert validation.items == ()
    assert validation.dropped[0]["reason"] == "name does not occur in the program"


def test_high_score_item_hidden_but_kept(mars_facts):
    raw = json.dumps({"items": [_valid_item(name="weight", score=9,
                                            misleading_type=False,
                                            suggested_name="earth_weight")]})
    validation = validate_identifier_response(raw, mars_facts)
    assert len(validation.items) == 1
    assert validation.visible(6) == ()


@pytest.mark.parametrize("bad", [
    _valid_item(line=0),
    _valid_item(line=99),
    _valid_item(line="4"),
    _valid_item(score=0),
    _valid_item(score=11),
    _valid_item(score="great"),
    _valid_item(suggested_name="weight_str"),
    _valid_item(suggested_name="Weight"),
    _valid_item(suggested_name="for"),
    _valid_item(suggested_name="9lives"),
    _valid_item(misleading_type="yes"),
    _valid_item(explanation="   "),
    "not even an object",
])
def test_invalid_items_dropped_not_raised(mars_facts, bad):
    raw = json.dumps({"items": [bad, _valid_item()]})
    validation = validate_identifier_response(raw, mars_facts)
    assert [item.name for item in validation.items] == ["weight_str"]
    assert len(validation.dropped) == 1


def test_wrong_top_level_shape_raises(mars_facts):
    for raw in ("[]", "42", '{"entries": []}', "{ not json"):
        with pytest.raises(SchemaError):
            validate_identifier_response(raw, mars_facts)


# --- comment validation ---------------------------------------------------------


def test_hallucinated_praise_on_commentless_program_removed():
    facts, _ = _facts_and_source("def f():\n    return 3\n")
    raw = json.dumps({
        "positive": {"line": 1, "text": "Great job adding comments to the program!"},
        "suggestions": [{"line": 2, "text": "describe the return value"}],
    })
    validation = validate_comment_response(raw, facts)
    assert validation.items.positive is None
    assert validation.items.suggestions == ((2, "describe the return value"),)
    assert validation.dropped


def test_suggestions_truncated_to_two(mars_facts):
    raw = json.dumps({"suggestions": [
        {"line": n, "text": f"note {n}"} for n in (3, 4, 6, 7)
    ]})
    validation = validate_comment_response(raw, mars_facts)
    assert validation.items.suggestions == ((3, "note 3"), (4, "note 4"))


def test_out_of_range_suggestions_dropped(mars_facts):
    raw = json.dumps({"suggestions": [
        {"line": 40, "text": "beyond the file"},
        {"line": 6, "text": "explain the ratio"},
    ]})
    validation = validate_comment_response(raw, mars_facts)
    assert validation.items.suggestions == ((6, "explain the ratio"),)


def test_empty_response_object_is_valid(mars_facts):
    validation = validate_comment_response("{}", mars_facts)
    assert validation.items.positive is None
    assert validation.items.suggestions == ()


def test_valid_praise_kept(mars_facts):
    raw = json.dumps({"positive": {"line": 2, "text": "nice comment"}})
    validation = validate_comment_response(raw, mars_facts)
    assert validation.items.positive == (2, "nice comment")
