"""Classify post-functionality code edits and measure feedback incorporation.

Behavioral equivalence is approximated syntactically: two programs whose
canonical forms match (comments gone, identifiers renamed positionally,
single-assignment literal constants inlined) are treated as the same program,
so an edit between them is a pure style edit.
"""

from __future__ import annotations

import ast
import io
import json
import tokenize
from dataclasses import dataclass, field
from datetime import datetime

from .program_facts import ProgramFacts, SourceProgram, parse_program
from .report import FeedbackReport, report_from_dict

NONE = "none"
FUNCTIONALITY = "functionality"
STYLE = "style"
COMBINED = "combined"

SUGGESTED_NAME_ADOPTED = "suggested_name_adopted"
COMMENT_ADDED_NEAR_SUGGESTED_LINE = "comment_added_near_suggested_line"
MAGIC_NUMBER_EXTRACTED_TO_CONSTANT = "magic_number_extracted_to_constant"
DECOMPOSITION_APPLIED = "decomposition_applied"

# Token edit distance at or above this counts as a significant edit; a rename
# of one variable used three times just clears the bar.
SIGNIFICANT_TOKEN_DISTANCE = 3


# --- canonicalization --------------------------------------------------------


@dataclass
class _Scope:
    bound: set[str]
    mapping: dict[str, str] = field(default_factory=dict)


def _bound_in_block(statements: list[ast.stmt]) -> set[str]:
    """Names bound by a block, not descending into nested function scopes."""
    bound: set[str] = set()

    def walk(node: ast.AST) -> None:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            bound.add(node.name)
            return  # its params/locals belong to the nested scope
        if isinstance(node, ast.Name) and isinstance(node.ctx, (ast.Store, ast.Del)):
            bound.add(node.id)
        for child in ast.iter_child_nodes(node):
            walk(child)

    for stmt in statements:
        walk(stmt)
    return bound


def _all_bound_names(tree: ast.AST) -> set[str]:
    bound: set[str] = set()
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            bound.add(node.name)
        elif isinstance(node, ast.arg):
            bound.add(node.arg)
        elif isinstance(node, ast.Name) and isinstance(node.ctx, (ast.Store, ast.Del)):
            bound.add(node.id)
    return bound


class _Canonicalizer(ast.NodeTransformer):
    def __init__(self, tree: ast.AST, constants: dict[str, ast.expr]):
        self.constants = constants
        self.counter = 0
        self.scopes: list[_Scope] = []
        # names the program binds somewhere; anything else is builtin-like
        self.user_names = _all_bound_names(tree)
        self.unbound_map: dict[str, str] = {}

    def _fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def _rename(self, name: str) -> str | None:
        for scope in reversed(self.scopes):
            if name in scope.bound:
                if name not in scope.mapping:
                    scope.mapping[name] = self._fresh()
                return scope.mapping[name]
        return None

    def _rename_unbound(self, name: str) -> str:
        # reads of user names that resolve to no scope (e.g. a name only ever
        # assigned in some other function) get their own positional bucket so
        # canonical forms stay rename-invariant
        if name not in self.unbound_map:
            self.unbound_map[name] = f"u{len(self.unbound_map) + 1}"
        return self.unbound_map[name]

    def visit_Module(self, node: ast.Module) -> ast.Module:
        body = [s for s in node.body if not self._is_constant_def(s)]
        self.scopes.append(_Scope(bound=_bound_in_block(body)))
        node.body = [self.visit(s) for s in body]
        node.body = [s for s in node.body if s is not None]
        self.scopes.pop()
        return node

    def _is_constant_def(self, stmt: ast.stmt) -> bool:
        if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1 \
                and isinstance(stmt.targets[0], ast.Name):
            return stmt.targets[0].id in self.constants
        if isinstance(stmt, ast.AnnAssign) and isinstance(stmt.target, ast.Name):
            return stmt.target.id in self.constants
        return False

    def visit_FunctionDef(self, node: ast.FunctionDef) -> ast.FunctionDef:
        renamed = self._rename(node.name)
        if renamed is not None:
            node.name = renamed
        args = node.args
        params = [*args.posonlyargs, *args.args, *args.kwonlyargs]
        for extra in (args.vararg, args.kwarg):
            if extra is not None:
                params.append(extra)
        scope = _Scope(bound={p.arg for p in params} | _bound_in_block(node.body))
        self.scopes.append(scope)
        for param in params:
            param.annotation = None
            new_name = self._rename(param.arg)
            if new_name is not None:
                param.arg = new_name
        node.returns = None
        node.body = [self.visit(s) for s in node.body]
        node.body = [s for s in node.body if s is not None]
        if not node.body:
            node.body = [ast.Pass()]
        self.scopes.pop()
        return node

    visit_AsyncFunctionDef = visit_FunctionDef

    def visit_Name(self, node: ast.Name):
        renamed = self._rename(node.id)
        if renamed is not None:
            node.id = renamed
            return node
        if isinstance(node.ctx, ast.Load) and node.id in self.constants:
            inlined = ast.copy_location(self.constants[node.id], node)
            return inlined
        if node.id in self.user_names:
            node.id = self._rename_unbound(node.id)
        return node

    def visit_Expr(self, node: ast.Expr):
        # bare literal statements (docstrings included) are style, not behavior
        if isinstance(node.value, ast.Constant):
            return None
        return self.generic_visit(node)

    def generic_visit(self, node: ast.AST):
        node = super().generic_visit(node)
        for attr in ("body", "finalbody"):
            block = getattr(node, attr, None)
            if isinstance(block, list):
                block[:] = [s for s in block if s is not None]
                if not block and attr == "body" and isinstance(node, ast.stmt):
                    block.append(ast.Pass())
        for attr in ("orelse", "handlers"):
            block = getattr(node, attr, None)
            if isinstance(block, list):
                block[:] = [s for s in block if s is not None]
        return node


def _inline_candidates(text: str) -> dict[str, ast.expr]:
    facts = parse_program(SourceProgram(text=text))
    candidates: dict[str, ast.expr] = {}
    for const in facts.module_constants:
        if const.reassignment_count == 0:
            candidates[const.name] = ast.parse(const.value, mode="eval").body
    return candidates


def canonicalize(source_text: str) -> str:
    """Deterministic normal form; raises SyntaxError on unparseable input."""
    tree = ast.parse(source_text)
    transformer = _Canonicalizer(tree, _inline_candidates(source_text))
    canonical = transformer.visit(tree)
    ast.fix_missing_locations(canonical)
    return ast.unparse(canonical)


# --- edit classification ---------------------------------------------------------


@dataclass(frozen=True)
class IncorporationMatch:
    kind: str
    detail: str


@dataclass(frozen=True)
class EditClassification:
    label: str  # none | functionality | style | combined
    significant: bool
    incorporation: tuple[IncorporationMatch, ...] = ()


def _word_tokens(source_text: str) -> list[str]:
    """Code tokens plus comment words; formatting tokens dropped."""
    skipped = {tokenize.NEWLINE, tokenize.NL, tokenize.INDENT, tokenize.DEDENT,
               tokenize.ENCODING, tokenize.ENDMARKER}
    tokens: list[str] = []
    try:
        for tok in tokenize.generate_tokens(io.StringIO(source_text).readline):
            if tok.type in skipped:
                continue
            if tok.type == tokenize.COMMENT:
                tokens.extend(tok.string.lstrip("#").split())
            else:
                tokens.append(tok.string)
    except (tokenize.TokenError, IndentationError):
        tokens.append("<tokenize-error>")
    return tokens


def _edit_distance(a: list[str], b: list[str]) -> int:
    if a == b:
        return 0
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            current[j] = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
        previous = current
    return previous[-1]


def token_edit_distance(before: str, after: str) -> int:
    return _edit_distance(_word_tokens(before), _word_tokens(after))


def _style_surface_changed(before: ProgramFacts, after: ProgramFacts) -> bool:
    before_names = before.identifier_names()
    after_names = after.identifier_names()
    if (before_names - after_names) and (after_names - before_names):
        return True  # some name disappeared while another appeared: a rename
    if sorted(before.comments.values()) != sorted(after.comments.values()):
        return True
    before_consts = {c.name for c in before.module_constants}
    after_consts = {c.name for c in after.module_constants}
    if after_consts - before_consts:
        return True
    if len(after.functions) > len(before.functions):
        return True
    return False


def _viewed_suggestions(viewed_reports: list[FeedbackReport]):
    renames: list[tuple[str, str]] = []
    comment_lines: list[int] = []
    magic_values: list[str] = []
    decomposition_flagged = False
    for report in viewed_reports:
        for section in report.sections:
            for item in section.items:
                if item.kind == "rename" and item.subject and item.suggestion:
                    renames.append((item.subject, item.suggestion))
                elif item.kind == "comment_suggestion" and item.line is not None:
                    comment_lines.append(item.line)
                elif item.kind == "magic_number" and item.subject:
                    magic_values.append(item.subject)
                elif item.kind in ("long_function", "duplicate_block"):
                    decomposition_flagged = True
    return renames, comment_lines, magic_values, decomposition_flagged


def _find_incorporation(before: ProgramFacts, after: ProgramFacts,
                        viewed_reports: list[FeedbackReport]) -> tuple[IncorporationMatch, ...]:
    renames, comment_lines, magic_values, decomposition_flagged = \
        _viewed_suggestions(viewed_reports)
    before_names = before.identifier_names()
    after_names = after.identifier_names()
    matches: list[IncorporationMatch] = []

    for old, new in renames:
        if (new in after_names and new not in before_names
                and old in before_names and old not in after_names):
            matches.append(IncorporationMatch(SUGGESTED_NAME_ADOPTED, new))

    for line in comment_lines:
        window = {line - 1, line, line + 1}
        added = {l for l in after.comments if l in window} - set(before.comments)
        if added:
            matches.append(IncorporationMatch(COMMENT_ADDED_NEAR_SUGGESTED_LINE, str(line)))

    before_const_values = {c.value for c in before.module_constants}
    for value in magic_values:
        extracted = any(c.value == value and c.read_count >= 1
                        for c in after.module_constants)
        if extracted and value not in before_const_values:
            matches.append(IncorporationMatch(MAGIC_NUMBER_EXTRACTED_TO_CONSTANT, value))

    if decomposition_flagged and len(after.functions) > len(before.functions):
        matches.append(IncorporationMatch(DECOMPOSITION_APPLIED,
                                          str(len(after.functions))))
    return tuple(matches)


def classify_edit(before: str, after: str,
                  viewed_reports: list[FeedbackReport] | None = None,
                  significant_distance: int = SIGNIFICANT_TOKEN_DISTANCE) -> EditClassification:
    """Label one revision as none / functionality / style / combined."""
    viewed_reports = viewed_reports or []
    if before == after:
        return EditClassification(label=NONE, significant=False)
    try:
        canon_before = canonicalize(before)
        canon_after = canonicalize(after)
    except SyntaxError:
        # broken-then-fixed (or newly broken) code changes behavior by definition
        return EditClassification(label=FUNCTIONALITY, significant=True)

    significant = token_edit_distance(before, after) >= significant_distance
    before_facts = parse_program(SourceProgram(text=before))
    after_facts = parse_program(SourceProgram(text=after))

    if canon_before == canon_after:
        label = STYLE
    elif _style_surface_changed(before_facts, after_facts):
        label = COMBINED
    else:
        label = FUNCTIONALITY

    incorporation: tuple[IncorporationMatch, ...] = ()
    if label in (STYLE, COMBINED):
        incorporation = _find_incorporation(before_facts, after_facts, viewed_reports)
    return EditClassification(label=label, significant=significant,
                              incorporation=incorporation)


# --- traces and metrics ------------------------------------------------------------


@dataclass(frozen=True)
class Snapshot:
    at: datetime
    source: str
    tests_passed: bool


@dataclass(frozen=True)
class SnapshotTrace:
    student_id: str
    problem_id: str
    snapshots: tuple[Snapshot, ...]
    reports_viewed: tuple[tuple[datetime, FeedbackReport], ...] = ()

    def __post_init__(self):
        if not self.snapshots:
            raise ValueError("a trace needs at least one snapshot")
        times = [s.at for s in self.snapshots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("snapshot timestamps must be strictly increasing")


def trace_from_dict(data: dict) -> SnapshotTrace:
    return SnapshotTrace(
        student_id=data["student_id"],
        problem_id=data["problem_id"],
        snapshots=tuple(
            Snapshot(at=datetime.fromisoformat(s["at"]), source=s["source"],
                     tests_passed=s["tests_passed"])
            for s in data["snapshots"]
        ),
        reports_viewed=tuple(
            (datetime.fromisoformat(v["at"]), report_from_dict(v["report"]))
            for v in data.get("reports_viewed", [])
        ),
    )


def load_traces_jsonl(path) -> tuple[list[SnapshotTrace], int]:
    """Read one trace per line; corrupt lines are skipped, their count returned."""
    traces: list[SnapshotTrace] = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                traces.append(trace_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError):
                skipped += 1
    return traces, skipped


@dataclass(frozen=True)
class TraceOutcome:
    student_id: str
    problem_id: str
    viewer: bool
    passed_functionality: bool
    edits: tuple[EditClassification, ...]  # significant edits only

    @property
    def editor(self) -> bool:
        return bool(self.edits)

    @property
    def style_editor(self) -> bool:
        return any(e.label in (STYLE, COMBINED) for e in self.edits)

    @property
    def incorporated(self) -> bool:
        return any(e.incorporation for e in self.edits)


def analyze_trace(trace: SnapshotTrace,
                  significant_distance: int = SIGNIFICANT_TOKEN_DISTANCE) -> TraceOutcome:
    first_pass = next((i for i, s in enumerate(trace.snapshots) if s.tests_passed), None)
    edits: list[EditClassification] = []
    if first_pass is not None:
        for previous, current in zip(trace.snapshots[first_pass:],
                                     trace.snapshots[first_pass + 1:]):
            viewed = [report for at, report in trace.reports_viewed if at <= current.at]
            label = classify_edit(previous.source, current.source, viewed,
                                  significant_distance)
            if label.significant:
                edits.append(label)
    return TraceOutcome(
        student_id=trace.student_id,
        problem_id=trace.problem_id,
        viewer=bool(trace.reports_viewed),
        passed_functionality=first_pass is not None,
        edits=tuple(edits),
    )


def trace_metrics(traces: list[SnapshotTrace],
                  significant_distance: int = SIGNIFICANT_TOKEN_DISTANCE) -> dict:
    """Aggregate edit behavior over a corpus of traces (order-independent)."""
    outcomes = [analyze_trace(t, significant_distance) for t in traces]

    def count(predicate) -> dict[str, int]:
        return {
            "viewers": sum(1 for o in outcomes if o.viewer and predicate(o)),
            "non_viewers": sum(1 for o in outcomes if not o.viewer and predicate(o)),
        }

    passed = count(lambda o: o.passed_functionality)
    editors = count(lambda o: o.editor)
    style_editors = count(lambda o: o.style_editor)

    label_counts = {STYLE: 0, FUNCTIONALITY: 0, COMBINED: 0}
    for outcome in outcomes:
        for edit in outcome.edits:
            label_counts[edit.label] += 1

    def fraction(part: int, whole: int) -> float:
        return part / whole if whole else 0.0

    total_style_editors = style_editors["viewers"] + style_editors["non_viewers"]
    incorporated = sum(1 for o in outcomes if o.style_editor and o.incorporated)

    return {
        "trace_count": len(traces),
        "passed_functionality": passed,
        "made_significant_edit": editors,
        "editor_fraction": {
            "viewers": fraction(editors["viewers"], passed["viewers"]),
            "non_viewers": fraction(editors["non_viewers"], passed["non_viewers"]),
        },
        "edit_label_counts": label_counts,
        "style_editors": style_editors,
        "style_editor_fraction_among_editors": {
            "viewers": fraction(style_editors["viewers"], editors["viewers"]),
            "non_viewers": fraction(style_editors["non_viewers"], editors["non_viewers"]),
        },
        "incorporated_style_editors": incorporated,
        "incorporation_rate": fraction(incorporated, total_style_editors),
    }


def render_metrics_table(summary: dict) -> str:
    """Plain-text table for the metrics summary."""
    rows = [
        ("traces", str(summary["trace_count"]), ""),
        ("", "viewers", "non-viewers"),
        ("passed functionality",
         str(summary["passed_functionality"]["viewers"]),
         str(summary["passed_functionality"]["non_viewers"])),
        ("made significant edit",
         str(summary["made_significant_edit"]["viewers"]),
         str(summary["made_significant_edit"]["non_viewers"])),
        ("editor fraction",
         f"{summary['editor_fraction']['viewers']:.2f}",
         f"{summary['editor_fraction']['non_viewers']:.2f}"),
        ("style editors",
         str(summary["style_editors"]["viewers"]),
         str(summary["style_editors"]["non_viewers"])),
        ("style-editor fraction",
         f"{summary['style_editor_fraction_among_editors']['viewers']:.2f}",
         f"{summary['style_editor_fraction_among_editors']['non_viewers']:.2f}"),
    ]
    lines = [
        f"{label:<24}{a:>10}{b:>14}" for label, a, b in rows
    ]
    counts = summary["edit_label_counts"]
    lines.append(f"{'edit labels':<24}style={counts['style']} "
                 f"functionality={counts['functionality']} combined={counts['combined']}")
    lines.append(f"{'incorporation rate':<24}"
                 f"{summary['incorporation_rate']:.2f} "
                 f"({summary['incorporated_style_editors']} of "
                 f"{summary['style_editors']['viewers'] + summary['style_editors']['non_viewers']} style editors)")
    return "\n".join(lines) + "\n"
