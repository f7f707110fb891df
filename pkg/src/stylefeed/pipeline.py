"""End-to-end feedback generation: parse, run static rules, query the model,
validate, assemble. Transport failures degrade to static-only output instead
of erroring."""

from __future__ import annotations

from datetime import datetime

from .config import EngineConfig
from .orchestrator import (
    CommentItems,
    CommentValidation,
    ExhaustedRetries,
    IdentifierValidation,
    SchemaError,
    Transport,
    TransportError,
    build_comment_prompt,
    build_identifier_prompt,
    request_feedback,
    validate_comment_response,
    validate_identifier_response,
)
from .program_facts import SourceProgram, parse_program
from .report import FeedbackReport, assemble_report
from .static_rules import analyze_constants, analyze_decomposition

_EMPTY_IDS = IdentifierValidation(items=(), dropped=())
_EMPTY_COMMENTS = CommentValidation(items=CommentItems(), dropped=())


def generate_report(source: SourceProgram, transport: Transport,
                    config: EngineConfig, now: datetime) -> FeedbackReport:
    """Produce one feedback report. Raises SyntaxError on unparseable input;
    any transport trouble yields a degraded report, never an exception."""
    facts = parse_program(source)
    static = analyze_constants(facts, config.rules) + analyze_decomposition(facts, config.rules)

    degraded: list[str] = []
    attempt_counts: dict[str, int] = {}

    ids = _EMPTY_IDS
    try:
        result = request_feedback(build_identifier_prompt(facts, source), transport,
                                  max_retries=config.max_retries)
        attempt_counts["identifiers"] = result.attempt_count
        ids = validate_identifier_response(result.raw_text, facts)
    except (TransportError, ExhaustedRetries, SchemaError) as exc:
        degraded.append("identifiers")
        attempt_counts["identifiers"] = getattr(exc, "attempts", 1)

    comments = _EMPTY_COMMENTS
    try:
        result = request_feedback(build_comment_prompt(facts, source), transport,
                                  max_retries=config.max_retries)
        attempt_counts["comments"] = result.attempt_count
        comments = validate_comment_response(result.raw_text, facts)
    except (TransportError, ExhaustedRetries, SchemaError) as exc:
        degraded.append("comments")
        attempt_counts["comments"] = getattr(exc, "attempts", 1)

    report = assemble_report(
        static,
        ids,
        comments,
        problem_id=source.problem_id,
        generated_at=now.isoformat(),
        degraded_categories=tuple(degraded),
        surface_threshold=config.surface_threshold,
        rules=config.rules,
    )
    report.diagnostics["attempt_counts"] = attempt_counts
    return report
