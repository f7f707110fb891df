"""Parser facts: worked example, edge programs, and structural properties."""

import io
import random
import tokenize

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_small_program
from stylefeed.program_facts import (
    SourceProgram,
    comment_line_map,
    facts_to_dict,
    identifier_value_map,
    parse_program,
)


def test_worked_example_identifiers(mars_facts):
    variables = [i.name for i in mars_facts.identifiers if i.kind == "variable"]
    assert variables == ["weight", "weight_str", "z", "s"]
    functions = [i.name for i in mars_facts.identifiers if i.kind == "function"]
    assert functions == ["main"]


def test_worked_example_comments(mars_facts):
    assert comment_line_map(mars_facts) == {2: "ask the user for a weight on earth"}


def test_worked_example_numeric_literals(mars_facts):
    assert mars_facts.numeric_literals == (("0.378", 6, "main"),)


def test_worked_example_value_map(mars_facts):
    mapping = identifier_value_map(mars_facts)
    assert list(mapping) == ["weight", "weight_str", "z", "s"]
    assert mapping["weight"] == ['input("Enter a weight on earth:")']
    assert mapping["weight_str"] == ["float(weight)"]
    assert mapping["z"] == ["weight_str * 0.378"]
    assert mapping["s"] == ["str(z)"]


def test_worked_example_inferred_kinds(mars_facts):
    kinds = {i.name: i.assigned_values[0][1] for i in mars_facts.identifiers
             if i.kind == "variable"}
    assert kinds == {"weight": "call-result", "weight_str": "float",
                     "z": "other", "s": "string"}


def test_empty_function():
    facts = parse_program(SourceProgram(text="def f():\n    pass\n"))
    assert len(facts.functions) == 1
    fact = facts.functions[0]
    assert fact.name == "f"
    assert fact.body_lines == 1
    assert not [i for i in facts.identifiers if i.kind == "variable"]
    assert facts.comments == {}


def test_twenty_statement_function_body_lines():
    # oracle: 20 single-line statements, no blanks or comments, counted by hand
    body = "\n".join(f"    x{i} = {i}" for i in range(20))
    facts = parse_program(SourceProgram(text=f"def big():\n{body}\n"))
    assert facts.functions[0].body_lines == 20


def test_one_line_def_has_no_body_lines():
    facts = parse_program(SourceProgram(text="def f(): pass\n"))
    assert facts.functions[0].body_lines == 0
    assert facts.functions[0].normalized_body == ()


def test_body_lines_skip_blanks_and_comment_only_lines():
    text = (
        "def f():\n"
        "    a = 1\n"
        "\n"
        "    # just a note\n"
        "    b = 2\n"
    )
    facts = parse_program(SourceProgram(text=text))
    assert facts.functions[0].body_lines == 2
    assert facts.functions[0].body_line_numbers == (2, 5)


def test_no_assignments_empty_value_map():
    facts = parse_program(SourceProgram(text="print(1 + 1)\n"))
    assert identifier_value_map(facts) == {}


def test_reassignment_preserves_order():
    facts = parse_program(SourceProgram(text="x = 1\nx = 2\n"))
    assert identifier_value_map(facts) == {"x": ["1", "2"]}


def test_commentless_program_empty_comment_map():
    facts = parse_program(SourceProgram(text="x = 1\n"))
    assert comment_line_map(facts) == {}


def test_inline_trailing_comment_keyed_by_own_line():
    text = "a = 1\nb = 2\nc = 3\nd = 4\ne = a + b  # add them up\n"
    facts = parse_program(SourceProgram(text=text))
    assert comment_line_map(facts) == {5: "add them up"}


def test_syntax_error_raised_with_line():
    with pytest.raises(SyntaxError) as err:
        parse_program(SourceProgram(text="def broken(:\n    pass\n"))
    assert err.value.lineno == 1


def test_empty_text_rejected():
    with pytest.raises(ValueError):
        SourceProgram(text="")


def test_line_count_with_and_without_trailing_newline():
    assert SourceProgram(text="a = 1\nb = 2\n").line_count == 2
    assert SourceProgram(text="a = 1\nb = 2").line_count == 2


def test_multiple_targets_share_expression_text():
    facts = parse_program(SourceProgram(text="a = b = 1\nx, y = 2, 3\n"))
    mapping = identifier_value_map(facts)
    assert mapping == {"a": ["1"], "b": ["1"], "x": ["2, 3"], "y": ["2, 3"]}


def test_parameters_and_loop_targets_recorded():
    text = "def f(n):\n    for i in range(n):\n        print(i)\n"
    facts = parse_program(SourceProgram(text=text))
    kinds = {i.name: i.kind for i in facts.identifiers}
    assert kinds == {"f": "function", "n": "parameter", "i": "variable"}
    assert identifier_value_map(facts)["i"] == ["range(n)"]


def test_module_constants_counts():
    text = (
        "MAX = 10\n"
        "PI = 3.14\n"
        "PI = 3.1415\n"
        "rate = 0.5\n"
        "print(PI * rate)\n"
    )
    facts = parse_program(SourceProgram(text=text))
    by_name = {c.name: c for c in facts.module_constants}
    assert by_name["MAX"].read_count == 0
    assert by_name["MAX"].reassignment_count == 0
    assert by_name["MAX"].is_uppercase
    assert by_name["PI"].reassignment_count == 1
    assert by_name["PI"].read_count == 1
    assert not by_name["rate"].is_uppercase
    assert facts.constant_def_lines == frozenset({1, 2, 3, 4})


def test_local_shadow_does_not_count_as_module_read():
    text = (
        "LIMIT = 9\n"
        "def f():\n"
        "    LIMIT = 1\n"
        "    return LIMIT\n"
    )
    facts = parse_program(SourceProgram(text=text))
    const = facts.module_constants[0]
    assert const.read_count == 0
    assert const.reassignment_count == 0


def test_negative_literal_recorded_signed():
    facts = parse_program(SourceProgram(text="x = -5\ny = -1\n"))
    values = [v for v, _, _ in facts.numeric_literals]
    assert values == ["-5", "-1"]


def test_facts_serialization_is_stable(mars_facts):
    assert facts_to_dict(mars_facts) == facts_to_dict(mars_facts)
    assert list(facts_to_dict(mars_facts)) == [
        "line_count", "functions", "identifiers", "comments",
        "numeric_literals", "module_constants", "constant_def_lines",
    ]


# --- properties over generated programs ---------------------------------------


program_texts = st.integers(min_value=0, max_value=10_000).map(
    lambda seed: random_small_program(random.Random(seed)))


@settings(max_examples=60, deadline=None)
@given(program_texts)
def test_every_fact_line_in_range(text):
    facts = parse_program(SourceProgram(text=text))
    count = facts.line_count
    for fn in facts.functions:
        assert 1 <= fn.def_line <= fn.end_line <= count
        assert all(1 <= line <= count for line in fn.body_line_numbers)
    for ident in facts.identifiers:
        assert 1 <= ident.first_line <= count
    assert all(1 <= line <= count for line in facts.comments)
    assert all(1 <= line <= count for _, line, _ in facts.numeric_literals)


@settings(max_examples=60, deadline=None)
@given(program_texts)
def test_identifier_names_are_legal_and_not_fabricated(text):
    facts = parse_program(SourceProgram(text=text))
    source_names = {
        tok.string
        for tok in tokenize.generate_tokens(io.StringIO(text).readline)
        if tok.type == tokenize.NAME
    }
    for ident in facts.identifiers:
        assert ident.name.isidentifier()
        assert ident.name in source_names


@settings(max_examples=60, deadline=None)
@given(program_texts)
def test_trailing_whitespace_does_not_change_normalized_body(text):
    reformatted = "".join(line + "   \n" for line in text.splitlines())
    original = parse_program(SourceProgram(text=text))
    spaced = parse_program(SourceProgram(text=reformatted))
    assert [f.normalized_body for f in original.functions] == \
           [f.normalized_body for f in spaced.functions]


@settings(max_examples=60, deadline=None)
@given(program_texts)
def test_numeric_literal_occurrences_match_token_stream(text):
    facts = parse_program(SourceProgram(text=text))
    number_tokens = [
        tok.string
        for tok in tokenize.generate_tokens(io.StringIO(text).readline)
        if tok.type == tokenize.NUMBER
    ]
    assert len(facts.numeric_literals) == len(number_tokens)


@settings(max_examples=40, deadline=None)
@given(program_texts)
def test_parse_is_deterministic(text):
    source = SourceProgram(text=text)
    assert facts_to_dict(parse_program(source)) == facts_to_dict(parse_program(source))


@settings(max_examples=40, deadline=None)
@given(program_texts)
def test_comment_map_partitions_lines(text):
    facts = parse_program(SourceProgram(text=text))
    commented = set(comment_line_map(facts))
    uncommented = set(range(1, facts.line_count + 1)) - commented
    assert commented | uncommented == set(range(1, facts.line_count + 1))
    assert commented & uncommented == set()
