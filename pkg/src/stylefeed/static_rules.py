"""Deterministic style analyses: constant/magic-number rules and decomposition rules.

Pure functions over ProgramFacts; identical facts always yield identical
findings in identical order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import RuleConfig
from .program_facts import MODULE_SCOPE, ProgramFacts

UNUSED_CONSTANT = "UnusedConstant"
MAGIC_NUMBER = "MagicNumber"
CONSTANT_USED_AS_VARIABLE = "ConstantUsedAsVariable"
LOWERCASE_CONSTANT = "LowercaseConstant"
LONG_FUNCTION = "LongFunction"
DUPLICATE_BLOCK = "DuplicateBlock"

CONSTANT_KINDS = frozenset({UNUSED_CONSTANT, MAGIC_NUMBER, CONSTANT_USED_AS_VARIABLE, LOWERCASE_CONSTANT})
DECOMPOSITION_KINDS = frozenset({LONG_FUNCTION, DUPLICATE_BLOCK})

_KIND_ORDER = {
    UNUSED_CONSTANT: 0,
    MAGIC_NUMBER: 1,
    CONSTANT_USED_AS_VARIABLE: 2,
    LOWERCASE_CONSTANT: 3,
    LONG_FUNCTION: 4,
    DUPLICATE_BLOCK: 5,
}


@dataclass(frozen=True)
class StyleFinding:
    """One static-analysis finding; block kinds also carry the matched line lists."""

    kind: str
    line: int
    subject: str
    message: str
    suggestion: str | None = None
    # DuplicateBlock only: physical lines of each matched run, equal lengths.
    lines_a: tuple[int, ...] = ()
    lines_b: tuple[int, ...] = ()
    functions: tuple[str, str] | None = None


def _sorted_capped(findings: list[StyleFinding], config: RuleConfig) -> list[StyleFinding]:
    findings.sort(key=lambda f: (f.line, _KIND_ORDER[f.kind], f.subject))
    return findings[: config.max_findings_per_category]


def analyze_constants(facts: ProgramFacts, config: RuleConfig | None = None) -> list[StyleFinding]:
    """Unused constants, magic numbers, reassigned constants, lowercase constants."""
    config = config or RuleConfig()
    findings: list[StyleFinding] = []

    for const in facts.module_constants:
        if const.is_uppercase and const.read_count == 0:
            findings.append(StyleFinding(
                kind=UNUSED_CONSTANT,
                line=const.line,
                subject=const.name,
                message=f"The constant {const.name} is defined but never used.",
                suggestion=f"Use {const.name} where its value appears, or remove it.",
            ))
        if const.is_uppercase and const.reassignment_count > 0:
            findings.append(StyleFinding(
                kind=CONSTANT_USED_AS_VARIABLE,
                line=const.line,
                subject=const.name,
                message=f"{const.name} is written like a constant but gets reassigned later.",
                suggestion=f"Keep {const.name} fixed, or rename it in lowercase if it needs to change.",
            ))
        if not const.is_uppercase and const.reassignment_count == 0 and const.read_count >= 1:
            findings.append(StyleFinding(
                kind=LOWERCASE_CONSTANT,
                line=const.line,
                subject=const.name,
                message=f"{const.name} never changes, so it is really a constant.",
                suggestion=f"Rename {const.name} to {const.name.upper()} to mark it as a constant.",
            ))

    for value, line, scope in facts.numeric_literals:
        if float(value) in config.exempt_numbers:
            continue
        if scope == MODULE_SCOPE and line in facts.constant_def_lines:
            continue
        findings.append(StyleFinding(
            kind=MAGIC_NUMBER,
            line=line,
            subject=value,
            message=f"The number {value} appears directly in the code without a name.",
            suggestion=f"Define an uppercase constant for {value} near the top of the file and use it here.",
        ))

    return _sorted_capped(findings, config)


def analyze_decomposition(facts: ProgramFacts, config: RuleConfig | None = None) -> list[StyleFinding]:
    """Long functions and duplicated blocks worth extracting into helpers."""
    config = config or RuleConfig()
    findings: list[StyleFinding] = []

    for fn in facts.functions:
        if fn.body_lines > config.long_function_max_lines:
            findings.append(StyleFinding(
                kind=LONG_FUNCTION,
                line=fn.def_line,
                subject=fn.name,
                message=(f"The function {fn.name} has {fn.body_lines} lines of code, "
                         f"which is a lot to read at once."),
                suggestion=f"Split {fn.name} into smaller helper functions that each do one thing.",
            ))

    findings.extend(_duplicate_blocks(facts, config.duplicate_min_run))
    return _sorted_capped(findings, config)


def _duplicate_blocks(facts: ProgramFacts, min_run: int) -> list[StyleFinding]:
    findings: list[StyleFinding] = []
    seen: set[tuple] = set()
    functions = facts.functions
    for i in range(len(functions)):
        for j in range(i, len(functions)):
            a, b = functions[i], functions[j]
            for start_a, start_b, length in _maximal_common_runs(
                    a.normalized_body, b.normalized_body, min_run, same=(i == j)):
                lines_a = a.body_line_numbers[start_a:start_a + length]
                lines_b = b.body_line_numbers[start_b:start_b + length]
                key = (a.name, b.name, lines_a, lines_b)
                if key in seen:
                    continue
                seen.add(key)
                if i == j:
                    subject = a.name
                    message = (f"The function {subject} repeats the same {length} lines twice "
                               f"(lines {lines_a[0]}-{lines_a[-1]} and {lines_b[0]}-{lines_b[-1]}).")
                else:
                    subject = f"{a.name} and {b.name}"
                    message = (f"The functions {subject} share {length} identical lines "
                               f"(lines {lines_a[0]}-{lines_a[-1]} and {lines_b[0]}-{lines_b[-1]}).")
                findings.append(StyleFinding(
                    kind=DUPLICATE_BLOCK,
                    line=lines_a[0],
                    subject=subject,
                    message=message,
                    suggestion="Move the repeated lines into a helper function and call it from both places.",
                    lines_a=lines_a,
                    lines_b=lines_b,
                    functions=(a.name, b.name),
                ))
    return findings


def _maximal_common_runs(a: tuple[str, ...], b: tuple[str, ...], min_run: int,
                         same: bool) -> list[tuple[int, int, int]]:
    """All maximal common runs (start_a, start_b, length) of length >= min_run.

    A run is maximal when it cannot be extended on either side. For ``same``
    sequences only pairs at distinct, non-overlapping offsets count.
    """
    n, m = len(a), len(b)
    if n < min_run or m < min_run:
        return []
    runs: list[tuple[int, int, int]] = []
    # suffix[i][j] = length of common run ending at a[i-1], b[j-1]
    previous = [0] * (m + 1)
    for i in range(1, n + 1):
        current = [0] * (m + 1)
        for j in range(1, m + 1):
            if a[i - 1] != b[j - 1]:
                continue
            current[j] = previous[j - 1] + 1
            length = current[j]
            if length < min_run:
                continue
            extendable = i < n and j < m and a[i] == b[j]
            if extendable:
                continue
            start_a, start_b = i - length, j - length
            if same:
                if start_a >= start_b:
                    continue
                if start_b < start_a + length:
                    continue  # overlapping offsets of one function
            runs.append((start_a, start_b, length))
        previous = current
    runs.sort()
    return runs
