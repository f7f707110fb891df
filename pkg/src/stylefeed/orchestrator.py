"""Prompt construction, model transport, and response validation.

No model text reaches a student without passing through the validators here:
every item must reference an identifier and line that really exist in the
parsed program, and praise for comments is dropped when the program has none.
"""

from __future__ import annotations

import json
import keyword
import os
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .program_facts import ProgramFacts, SourceProgram, identifier_value_map

IDENTIFIERS = "identifiers"
COMMENTS = "comments"

_PROMPT_DIR = Path(__file__).parent / "prompts"

CODE_MARKER = "Student program:"
AUX_MARKER = "Auxiliary data (JSON):"
CATEGORY_MARKER = "Feedback category:"

_SNAKE_CASE = re.compile(r"[a-z_][a-z0-9_]*\Z")


class TransportError(Exception):
    """The transport could not produce a response (network, timeout)."""


class ExhaustedRetries(Exception):
    """Every attempt returned unparseable or schema-invalid output."""

    def __init__(self, attempts: int):
        super().__init__(f"no valid response after {attempts} attempts")
        self.attempts = attempts


class SchemaError(Exception):
    """Top-level response shape does not match the required schema."""


class Transport(Protocol):
    def send(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class PromptPayload:
    category: str  # identifiers | comments
    instructions: str
    schema_description: str
    code_text: str
    aux_payload: dict


@dataclass(frozen=True)
class TransportResult:
    raw_text: str
    latency: float
    attempt_count: int


@dataclass(frozen=True)
class IdentifierItem:
    name: str
    line: int
    score: int  # 1-10, hidden diagnostic, never rendered to the student
    misleading_type: bool
    suggested_name: str
    explanation: str


@dataclass(frozen=True)
class CommentItems:
    positive: tuple[int, str] | None = None
    suggestions: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True)
class IdentifierValidation:
    items: tuple[IdentifierItem, ...]  # everything retained, including hidden
    dropped: tuple[dict, ...]

    def visible(self, surface_threshold: int = 6) -> tuple[IdentifierItem, ...]:
        return tuple(i for i in self.items
                     if i.misleading_type or i.score <= surface_threshold)


@dataclass(frozen=True)
class CommentValidation:
    items: CommentItems
    dropped: tuple[dict, ...]


def _read_prompt(name: str) -> str:
    return (_PROMPT_DIR / name).read_text(encoding="utf-8")


def build_identifier_prompt(facts: ProgramFacts, source: SourceProgram) -> PromptPayload:
    """Identifier-name prompt: code plus the variable -> assigned-values map."""
    return PromptPayload(
        category=IDENTIFIERS,
        instructions=_read_prompt("identifiers.txt"),
        schema_description=_read_prompt("identifier_response_schema.json"),
        code_text=source.text,
        aux_payload=identifier_value_map(facts),
    )


def build_comment_prompt(facts: ProgramFacts, source: SourceProgram) -> PromptPayload:
    """Comment prompt: code plus the line -> existing-comment map."""
    schema = _read_prompt("comment_response_schema.json")
    if not facts.comments:
        schema += "\nThe program has no comments, so \"positive\" MUST be omitted.\n"
    return PromptPayload(
        category=COMMENTS,
        instructions=_read_prompt("comments.txt"),
        schema_description=schema,
        code_text=source.text,
        aux_payload={str(line): text for line, text in sorted(facts.comments.items())},
    )


def serialize_prompt(payload: PromptPayload) -> str:
    """Render the payload as the single text prompt the transport contract takes."""
    return (
        f"{CATEGORY_MARKER} {payload.category}\n\n"
        f"{payload.instructions}\n"
        f"Respond with a single JSON object matching this schema exactly:\n"
        f"{payload.schema_description}\n"
        f"{CODE_MARKER}\n"
        f"```python\n{payload.code_text}\n```\n\n"
        f"{AUX_MARKER}\n"
        f"{json.dumps(payload.aux_payload)}\n"
    )


def request_feedback(payload: PromptPayload, transport: Transport,
                     max_retries: int = 2) -> TransportResult:
    """Send one logical request; retry internally on malformed responses.

    Raises TransportError when the transport itself fails and ExhaustedRetries
    when every attempt returned output that fails the top-level shape check.
    Both signal the caller to degrade to static-only feedback.
    """
    prompt = serialize_prompt(payload)
    started = time.monotonic()
    attempts = 0
    while attempts <= max_retries:
        attempts += 1
        raw = transport.send(prompt)
        try:
            _check_shape(payload.category, raw)
        except SchemaError:
            continue
        return TransportResult(raw_text=raw, latency=time.monotonic() - started,
                               attempt_count=attempts)
    raise ExhaustedRetries(attempts)


def _check_shape(category: str, raw: str) -> dict:
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, TypeError) as exc:
        raise SchemaError(f"response is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("response root must be a JSON object")
    if category == IDENTIFIERS:
        if not isinstance(data.get("items"), list):
            raise SchemaError("identifier response must carry an 'items' list")
    elif category == COMMENTS:
        if "positive" in data and not isinstance(data["positive"], (dict, type(None))):
            raise SchemaError("'positive' must be an object or null")
        if "suggestions" in data and not isinstance(data["suggestions"], list):
            raise SchemaError("'suggestions' must be a list")
    else:
        raise SchemaError(f"unknown category {category!r}")
    return data


def _legal_snake_name(name) -> bool:
    return (isinstance(name, str)
            and bool(_SNAKE_CASE.match(name))
            and name.isidentifier()
            and not keyword.iskeyword(name))


def validate_identifier_response(raw: str, facts: ProgramFacts) -> IdentifierValidation:
    """Parse and filter identifier items; invalid items are dropped, never raised."""
    data = _check_shape(IDENTIFIERS, raw)
    known_names = facts.identifier_names()
    items: list[IdentifierItem] = []
    dropped: list[dict] = []
    for entry in data["items"]:
        reason = _identifier_item_problem(entry, known_names, facts.line_count)
        if reason is not None:
            dropped.append({"item": entry, "reason": reason})
            continue
        items.append(IdentifierItem(
            name=entry["name"],
            line=entry["line"],
            score=entry["score"],
            misleading_type=entry["misleading_type"],
            suggested_name=entry["suggested_name"],
            explanation=entry["explanation"],
        ))
    return IdentifierValidation(items=tuple(items), dropped=tuple(dropped))


def _identifier_item_problem(entry, known_names: set[str], line_count: int) -> str | None:
    if not isinstance(entry, dict):
        return "item is not an object"
    name = entry.get("name")
    if not isinstance(name, str) or name not in known_names:
        return "name does not occur in the program"
    line = entry.get("line")
    if not isinstance(line, int) or isinstance(line, bool) or not 1 <= line <= line_count:
        return "line outside the program"
    score = entry.get("score")
    if not isinstance(score, int) or isinstance(score, bool) or not 1 <= score <= 10:
        return "score outside 1-10"
    if not isinstance(entry.get("misleading_type"), bool):
        return "misleading_type is not a boolean"
    suggested = entry.get("suggested_name")
    if not _legal_snake_name(suggested) or suggested == name:
        return "suggested_name is not a legal snake_case identifier distinct from name"
    explanation = entry.get("explanation")
    if not isinstance(explanation, str) or not explanation.strip():
        return "explanation is empty"
    return None


def validate_comment_response(raw: str, facts: ProgramFacts) -> CommentValidation:
    """Parse and filter comment feedback; hallucinated praise is removed."""
    data = _check_shape(COMMENTS, raw)
    dropped: list[dict] = []

    positive: tuple[int, str] | None = None
    raw_positive = data.get("positive")
    if raw_positive is not None:
        if not facts.comments:
            dropped.append({"item": raw_positive, "reason": "praise for comments on a commentless program"})
        elif (isinstance(raw_positive, dict)
                and isinstance(raw_positive.get("line"), int)
                and not isinstance(raw_positive.get("line"), bool)
                and 1 <= raw_positive["line"] <= facts.line_count
                and isinstance(raw_positive.get("text"), str)
                and raw_positive["text"].strip()):
            positive = (raw_positive["line"], raw_positive["text"])
        else:
            dropped.append({"item": raw_positive, "reason": "malformed or out-of-range positive entry"})

    suggestions: list[tuple[int, str]] = []
    for entry in data.get("suggestions", []):
        if (isinstance(entry, dict)
                and isinstance(entry.get("line"), int)
                and not isinstance(entry.get("line"), bool)
                and 1 <= entry["line"] <= facts.line_count
                and isinstance(entry.get("text"), str)
                and entry["text"].strip()):
            if len(suggestions) < 2:
                suggestions.append((entry["line"], entry["text"]))
            else:
                dropped.append({"item": entry, "reason": "more than two suggestions"})
        else:
            dropped.append({"item": entry, "reason": "malformed or out-of-range suggestion"})

    return CommentValidation(
        items=CommentItems(positive=positive, suggestions=tuple(suggestions)),
        dropped=tuple(dropped),
    )


# --- transports -----------------------------------------------------------------

_BUILTIN_CALLS = frozenset({
    "abs", "bool", "float", "input", "int", "len", "list", "max", "min",
    "print", "range", "round", "sorted", "str", "sum",
})

_NAME_SUFFIX_KINDS = {"_str": "string", "_int": "int", "_float": "float", "_bool": "bool"}

_KIND_SUFFIXES = {"float": "float", "int": "int", "string": "str",
                  "bool": "flag", "call-result": "value", "other": "value"}

_IDENT_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_QUOTED = re.compile(r"(\"[^\"]*\"|'[^']*')")


def _kind_of_expr_text(expr: str) -> str:
    """Syntactic type guess from an assigned-expression string (mock-side twin
    of the parser's AST inference, kept independent on purpose)."""
    expr = expr.strip()
    if not expr:
        return "other"
    if expr[0] in "\"'" or expr[:2] in ("f\"", "f'"):
        return "string"
    if expr in ("True", "False"):
        return "bool"
    if re.fullmatch(r"-?\d+", expr):
        return "int"
    if re.fullmatch(r"-?(\d+\.\d*|\.\d+)", expr):
        return "float"
    call = re.match(r"(float|int|str|bool)\(", expr)
    if call:
        return {"float": "float", "int": "int", "str": "string", "bool": "bool"}[call.group(1)]
    if re.match(r"[A-Za-z_][A-Za-z0-9_]*\(", expr):
        return "call-result"
    return "other"


class MockTransport:
    """Deterministic stand-in for the model so nothing here needs a network.

    Flags single-letter names and names whose type suffix contradicts the value
    they hold; proposes comments for uncommented lines that carry bare numbers.
    ``fail_times`` makes the first N calls return malformed text for retry tests.
    """

    def __init__(self, fail_times: int = 0):
        self.fail_times = fail_times
        self.calls = 0

    def send(self, prompt: str) -> str:
        self.calls += 1
        if self.calls <= self.fail_times:
            return "definitely { not json"
        category, code_text, aux = _parse_prompt(prompt)
        if category == IDENTIFIERS:
            return json.dumps({"items": _mock_identifier_items(code_text, aux)})
        return json.dumps(_mock_comment_feedback(code_text, aux))


def _parse_prompt(prompt: str) -> tuple[str, str, dict]:
    category_match = re.search(rf"{CATEGORY_MARKER} (\w+)", prompt)
    code_match = re.search(rf"{re.escape(CODE_MARKER)}\n```python\n(.*?)\n```",
                           prompt, re.DOTALL)
    aux_match = re.search(rf"{re.escape(AUX_MARKER)}\n(.*?)\n", prompt, re.DOTALL)
    if not (category_match and code_match and aux_match):
        raise TransportError("prompt is missing its code or auxiliary sections")
    return category_match.group(1), code_match.group(1), json.loads(aux_match.group(1))


def _first_line_of(name: str, code_text: str) -> int:
    pattern = re.compile(rf"\b{re.escape(name)}\b")
    for number, line in enumerate(code_text.splitlines(), start=1):
        if pattern.search(line):
            return number
    return 1


def _strip_kind_suffix(name: str) -> str:
    for suffix in ("_str", "_int", "_float", "_bool", "_num", "_val", "_value"):
        if name.endswith(suffix) and len(name) > len(suffix):
            return name[: -len(suffix)]
    return name


def _role_for(name: str, exprs: list[str]) -> str:
    for expr in reversed(exprs):
        for token in _IDENT_TOKEN.findall(expr):
            if token in _BUILTIN_CALLS or token == name:
                continue
            base = _strip_kind_suffix(token).lower()
            if len(base) > 1:
                return base
    return "result"


def _mock_identifier_items(code_text: str, aux: dict) -> list[dict]:
    items = []
    for name, exprs in aux.items():
        exprs = list(exprs)
        kind = _kind_of_expr_text(exprs[-1]) if exprs else "other"
        suffix_kind = next((k for s, k in _NAME_SUFFIX_KINDS.items() if name.endswith(s)), None)
        misleading = (suffix_kind is not None
                      and kind not in ("call-result", "other")
                      and kind != suffix_kind)
        single_letter = len(name) == 1
        if not (single_letter or misleading):
            continue
        suggested = f"{_role_for(name, exprs)}_{_KIND_SUFFIXES[kind]}"
        if suggested == name:
            suggested = f"renamed_{suggested}"
        if single_letter:
            explanation = (f"A single letter like '{name}' does not tell the reader "
                           f"what the value means; '{suggested}' does.")
        else:
            explanation = (f"'{name}' sounds like it holds a {suffix_kind} value but it "
                           f"actually holds a {kind} value, so '{suggested}' is more honest.")
        items.append({
            "name": name,
            "line": _first_line_of(name, code_text),
            "score": 2 if single_letter else 4,
            "misleading_type": misleading,
            "suggested_name": suggested,
            "explanation": explanation,
        })
    return items


def _mock_comment_feedback(code_text: str, aux: dict) -> dict:
    feedback: dict = {"suggestions": []}
    commented_lines = {int(line) for line in aux}
    if commented_lines:
        first = min(commented_lines)
        feedback["positive"] = {
            "line": first,
            "text": f"Nice work using a comment on line {first} to explain that step.",
        }
    for number, line in enumerate(code_text.splitlines(), start=1):
        if len(feedback["suggestions"]) == 2:
            break
        code = _QUOTED.sub("", line).split("#", 1)[0]
        if number not in commented_lines and re.search(r"(?<![A-Za-z0-9_.])\d+(?:\.\d+)?", code):
            feedback["suggestions"].append({
                "line": number,
                "text": (f"Line {number} uses a bare number; a short comment saying what "
                         f"the value represents would help a reader."),
            })
    return feedback


class LiveTransport:
    """HTTP transport for a real model endpoint, configured from the environment.

    Reads STYLEFEED_ENDPOINT, STYLEFEED_API_KEY and STYLEFEED_MODEL; never takes
    credentials from source or config files.
    """

    def __init__(self, timeout: float = 30.0):
        self.endpoint = os.environ.get("STYLEFEED_ENDPOINT", "")
        self.api_key = os.environ.get("STYLEFEED_API_KEY", "")
        self.model = os.environ.get("STYLEFEED_MODEL", "gpt-3.5-turbo")
        self.timeout = timeout
        if not self.endpoint:
            raise TransportError("STYLEFEED_ENDPOINT is not configured")

    def send(self, prompt: str) -> str:
        import httpx

        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "response_format": {"type": "json_object"},
        }
        try:
            response = httpx.post(self.endpoint, json=body, headers=headers,
                                  timeout=self.timeout)
            response.raise_for_status()
            return response.json()["choices"][0]["message"]["content"]
        except Exception as exc:  # network, HTTP status, shape of envelope
            raise TransportError(str(exc)) from exc


def make_transport(name: str, timeout: float = 30.0) -> Transport:
    if name == "mock":
        return MockTransport()
    if name == "live":
        return LiveTransport(timeout=timeout)
    raise ValueError(f"unknown transport {name!r}")
