"""Assemble validated findings into the four-section feedback report.

Section order is fixed (names, constants, comments, decomposition) so golden
fixtures stay stable. Diagnostics (scores, dropped items, attempt counts)
travel with the report but never appear in the rendered student view.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import RuleConfig
from .orchestrator import CommentValidation, IdentifierValidation
from .static_rules import CONSTANT_KINDS, StyleFinding

IDENTIFIER_NAMES = "IdentifierNames"
CONSTANTS_AND_MAGIC_NUMBERS = "ConstantsAndMagicNumbers"
COMMENTS_SECTION = "Comments"
DECOMPOSITION = "Decomposition"

CATEGORY_ORDER = (IDENTIFIER_NAMES, CONSTANTS_AND_MAGIC_NUMBERS, COMMENTS_SECTION, DECOMPOSITION)

_SECTION_TITLES = {
    IDENTIFIER_NAMES: "Identifier Names",
    CONSTANTS_AND_MAGIC_NUMBERS: "Constants and Magic Numbers",
    COMMENTS_SECTION: "Comments",
    DECOMPOSITION: "Decomposition",
}

_ALL_CLEAR = {
    IDENTIFIER_NAMES: "Your names look clear and descriptive. Nice work!",
    CONSTANTS_AND_MAGIC_NUMBERS: "No constant or magic-number issues found.",
    COMMENTS_SECTION: "No comment feedback this time.",
    DECOMPOSITION: "Your functions are a manageable size. Nothing to split.",
}

_UNAVAILABLE = {
    IDENTIFIER_NAMES: ("Sorry, naming feedback could not be generated this time. "
                       "Please request feedback again later."),
    COMMENTS_SECTION: ("Sorry, comment feedback could not be generated this time. "
                       "Please request feedback again later."),
}

# machine-readable item kinds, consumed by the panel and by edit analytics
RENAME = "rename"
PRAISE = "praise"
COMMENT_SUGGESTION = "comment_suggestion"
ALL_CLEAR = "all_clear"
UNAVAILABLE = "unavailable"


@dataclass(frozen=True)
class ReportItem:
    kind: str
    text: str
    line: int | None = None
    subject: str | None = None
    suggestion: str | None = None


@dataclass(frozen=True)
class ReportSection:
    category: str
    items: tuple[ReportItem, ...]


@dataclass(frozen=True)
class FeedbackReport:
    problem_id: str
    generated_at: str  # ISO 8601 UTC
    degraded: bool
    sections: tuple[ReportSection, ...]
    diagnostics: dict = field(default_factory=dict)


def assemble_report(static: list[StyleFinding],
                    ids: IdentifierValidation,
                    comments: CommentValidation,
                    *,
                    problem_id: str,
                    generated_at: str,
                    degraded_categories: tuple[str, ...] = (),
                    surface_threshold: int = 6,
                    rules: RuleConfig | None = None) -> FeedbackReport:
    """Merge static findings with validated model items into one report."""
    rules = rules or RuleConfig()

    identifier_items: list[ReportItem] = []
    if "identifiers" in degraded_categories:
        identifier_items.append(ReportItem(kind=UNAVAILABLE, text=_UNAVAILABLE[IDENTIFIER_NAMES]))
    else:
        for item in sorted(ids.visible(surface_threshold), key=lambda i: i.line):
            identifier_items.append(ReportItem(
                kind=RENAME,
                line=item.line,
                subject=item.name,
                suggestion=item.suggested_name,
                text=(f"The name '{item.name}' could be clearer. "
                      f"Consider '{item.suggested_name}': {item.explanation}"),
            ))

    constant_items = [_finding_item(f) for f in static if f.kind in CONSTANT_KINDS]

    comment_items: list[ReportItem] = []
    if "comments" in degraded_categories:
        comment_items.append(ReportItem(kind=UNAVAILABLE, text=_UNAVAILABLE[COMMENTS_SECTION]))
    else:
        if comments.items.positive is not None:
            line, text = comments.items.positive
            comment_items.append(ReportItem(kind=PRAISE, line=line, text=text))
        for line, text in sorted(comments.items.suggestions):
            comment_items.append(ReportItem(kind=COMMENT_SUGGESTION, line=line, text=text))

    decomposition_items = [_finding_item(f) for f in static if f.kind not in CONSTANT_KINDS]

    by_category = {
        IDENTIFIER_NAMES: identifier_items,
        CONSTANTS_AND_MAGIC_NUMBERS: constant_items,
        COMMENTS_SECTION: comment_items,
        DECOMPOSITION: decomposition_items,
    }
    sections = []
    for category in CATEGORY_ORDER:
        items = by_category[category]
        if not items:
            items = [ReportItem(kind=ALL_CLEAR, text=_ALL_CLEAR[category])]
        sections.append(ReportSection(category=category, items=tuple(items)))

    diagnostics = {
        "identifier_items": [
            {
                "name": i.name, "line": i.line, "score": i.score,
                "misleading_type": i.misleading_type,
                "suggested_name": i.suggested_name, "explanation": i.explanation,
            }
            for i in ids.items
        ],
        "dropped_identifier_items": list(ids.dropped),
        "dropped_comment_items": list(comments.dropped),
        "degraded_categories": list(degraded_categories),
    }

    return FeedbackReport(
        problem_id=problem_id,
        generated_at=generated_at,
        degraded=bool(degraded_categories),
        sections=tuple(sections),
        diagnostics=diagnostics,
    )


def _finding_item(finding: StyleFinding) -> ReportItem:
    kind = "".join(f"_{c.lower()}" if c.isupper() else c for c in finding.kind).lstrip("_")
    return ReportItem(
        kind=kind,
        line=finding.line,
        subject=finding.subject,
        suggestion=finding.suggestion,
        text=finding.message,
    )


def render_text(report: FeedbackReport) -> str:
    """Human-readable layout; no scores, no raw JSON, line refs as 'line N'."""
    lines = [f"Style feedback for {report.problem_id}" if report.problem_id
             else "Style feedback"]
    if report.degraded:
        lines.append("(Some automated feedback was unavailable; the rest is below.)")
    for section in report.sections:
        lines.append("")
        title = _SECTION_TITLES[section.category]
        lines.append(title)
        lines.append("-" * len(title))
        for item in section.items:
            if item.line is not None:
                lines.append(f"- line {item.line}: {item.text}")
            else:
                lines.append(f"- {item.text}")
            if item.suggestion and item.kind != RENAME:
                lines.append(f"  Tip: {item.suggestion}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: FeedbackReport) -> dict:
    """Canonical JSON form with stable key order; consumed by service, CLI, panel."""
    return {
        "problem_id": report.problem_id,
        "generated_at": report.generated_at,
        "degraded": report.degraded,
        "sections": [
            {
                "category": section.category,
                "items": [
                    {
                        "kind": item.kind,
                        "line": item.line,
                        "subject": item.subject,
                        "suggestion": item.suggestion,
                        "text": item.text,
                    }
                    for item in section.items
                ],
            }
            for section in report.sections
        ],
        "diagnostics": report.diagnostics,
    }


def report_from_dict(data: dict) -> FeedbackReport:
    return FeedbackReport(
        problem_id=data["problem_id"],
        generated_at=data["generated_at"],
        degraded=data["degraded"],
        sections=tuple(
            ReportSection(
                category=section["category"],
                items=tuple(
                    ReportItem(
                        kind=item["kind"],
                        line=item["line"],
                        subject=item["subject"],
                        suggestion=item["suggestion"],
                        text=item["text"],
                    )
                    for item in section["items"]
                ),
            )
            for section in data["sections"]
        ),
        diagnostics=data["diagnostics"],
    )
