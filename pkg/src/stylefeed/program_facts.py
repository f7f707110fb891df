"""Parse beginner-level Python source into the facts the style analyses consume.

The parser covers the CS1 subset (functions, assignments, conditionals, loops,
calls, literals, comments). Constructs outside the subset still contribute
generic facts as long as the text parses; unparseable text raises the builtin
SyntaxError so callers can refuse style feedback.
"""

from __future__ import annotations

import ast
import io
import tokenize
from dataclasses import dataclass, field

VARIABLE = "variable"
FUNCTION = "function"
PARAMETER = "parameter"

MODULE_SCOPE = "<module>"

# kind priority when one name plays several roles
_KIND_RANK = {FUNCTION: 2, PARAMETER: 1, VARIABLE: 0}


@dataclass(frozen=True)
class SourceProgram:
    """One student submission: raw text plus the problem it answers.

    Carries no student identity; downstream payloads are built from this alone.
    """

    text: str
    problem_id: str = ""

    def __post_init__(self):
        if not self.text:
            raise ValueError("program text must be non-empty")

    @property
    def line_count(self) -> int:
        return len(self.text.splitlines())


@dataclass(frozen=True)
class FunctionFact:
    name: str
    def_line: int
    end_line: int
    # Non-blank, non-comment-only physical lines strictly inside the body.
    body_lines: int
    # One entry per code-bearing body line: comment stripped, whitespace collapsed.
    normalized_body: tuple[str, ...]
    # Physical line of each normalized_body entry, parallel lists.
    body_line_numbers: tuple[int, ...]


@dataclass(frozen=True)
class IdentifierFact:
    name: str
    kind: str  # variable | function | parameter
    first_line: int
    # (expression text, inferred kind in {int, float, string, bool, call-result, other})
    assigned_values: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ModuleConstant:
    """Module-level name whose first assignment is a literal."""

    name: str
    line: int
    value: str
    is_uppercase: bool
    read_count: int
    reassignment_count: int


@dataclass(frozen=True)
class ProgramFacts:
    line_count: int
    functions: tuple[FunctionFact, ...]
    identifiers: tuple[IdentifierFact, ...]
    comments: dict[int, str]
    # (value as decimal string, line, enclosing function name or "<module>")
    numeric_literals: tuple[tuple[str, int, str], ...]
    module_constants: tuple[ModuleConstant, ...]
    # Lines holding the literal right-hand side of a module constant definition.
    constant_def_lines: frozenset[int] = field(default_factory=frozenset)

    def identifier_names(self) -> set[str]:
        return {ident.name for ident in self.identifiers}


def parse_program(source: SourceProgram) -> ProgramFacts:
    """Extract all facts for one program. Deterministic; raises SyntaxError."""
    text = source.text
    tree = ast.parse(text)
    comment_cols, comments = _collect_comments(text)
    lines = text.splitlines()

    functions = _collect_functions(tree, lines, comment_cols)
    identifiers = _collect_identifiers(tree, text)
    numeric_literals = _collect_numeric_literals(tree)
    module_constants, constant_def_lines = _collect_module_constants(tree)

    return ProgramFacts(
        line_count=source.line_count,
        functions=tuple(functions),
        identifiers=tuple(identifiers),
        comments=comments,
        numeric_literals=tuple(numeric_literals),
        module_constants=tuple(module_constants),
        constant_def_lines=frozenset(constant_def_lines),
    )


def identifier_value_map(facts: ProgramFacts) -> dict[str, list[str]]:
    """Variable name -> assigned expression texts, in source order."""
    mapping: dict[str, list[str]] = {}
    for ident in facts.identifiers:
        if ident.kind == VARIABLE:
            mapping[ident.name] = [expr for expr, _ in ident.assigned_values]
    return mapping


def comment_line_map(facts: ProgramFacts) -> dict[int, str]:
    """Physical line number -> comment text (leading ``#`` already stripped)."""
    return dict(facts.comments)


def facts_to_dict(facts: ProgramFacts) -> dict:
    """Canonical JSON-ready form with stable key order, for fixture snapshots."""
    return {
        "line_count": facts.line_count,
        "functions": [
            {
                "name": f.name,
                "def_line": f.def_line,
                "end_line": f.end_line,
                "body_lines": f.body_lines,
                "normalized_body": list(f.normalized_body),
                "body_line_numbers": list(f.body_line_numbers),
            }
            for f in facts.functions
        ],
        "identifiers": [
            {
                "name": i.name,
                "kind": i.kind,
                "first_line": i.first_line,
                "assigned_values": [list(v) for v in i.assigned_values],
            }
            for i in facts.identifiers
        ],
        "comments": {str(line): text for line, text in sorted(facts.comments.items())},
        "numeric_literals": [list(entry) for entry in facts.numeric_literals],
        "module_constants": [
            {
                "name": c.name,
                "line": c.line,
                "value": c.value,
                "is_uppercase": c.is_uppercase,
                "read_count": c.read_count,
                "reassignment_count": c.reassignment_count,
            }
            for c in facts.module_constants
        ],
        "constant_def_lines": sorted(facts.constant_def_lines),
    }


# --- comments ---------------------------------------------------------------


def _collect_comments(text: str) -> tuple[dict[int, int], dict[int, str]]:
    """Return ({line: column of '#'}, {line: stripped comment text})."""
    cols: dict[int, int] = {}
    stripped: dict[int, str] = {}
    for tok in tokenize.generate_tokens(io.StringIO(text).readline):
        if tok.type == tokenize.COMMENT:
            row, col = tok.start
            cols[row] = col
            stripped[row] = tok.string.lstrip("#").strip()
    return cols, stripped


# --- functions ---------------------------------------------------------------


def _collect_functions(tree: ast.Module, lines: list[str],
                       comment_cols: dict[int, int]) -> list[FunctionFact]:
    defs = [n for n in ast.walk(tree) if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))]
    defs.sort(key=lambda n: n.lineno)
    facts = []
    for node in defs:
        # a same-line body (def f(): pass) has no lines strictly inside
        body_start = max(node.body[0].lineno, node.lineno + 1)
        end_line = node.end_lineno or body_start
        normalized: list[str] = []
        numbers: list[int] = []
        for line_no in range(body_start, end_line + 1):
            raw = lines[line_no - 1]
            if line_no in comment_cols:
                raw = raw[: comment_cols[line_no]]
            squashed = " ".join(raw.split())
            if squashed:
                normalized.append(squashed)
                numbers.append(line_no)
        facts.append(
            FunctionFact(
                name=node.name,
                def_line=node.lineno,
                end_line=end_line,
                body_lines=len(normalized),
                normalized_body=tuple(normalized),
                body_line_numbers=tuple(numbers),
            )
        )
    return facts


# --- identifiers --------------------------------------------------------------


def _expr_text(text: str, node: ast.AST) -> str:
    segment = ast.get_source_segment(text, node)
    if segment is None:
        return ast.unparse(node)
    return " ".join(segment.split())


def _infer_kind(node: ast.AST) -> str:
    if isinstance(node, ast.Constant):
        value = node.value
        if isinstance(value, bool):
            return "bool"
        if isinstance(value, int):
            return "int"
        if isinstance(value, float):
            return "float"
        if isinstance(value, str):
            return "string"
        return "other"
    if isinstance(node, ast.JoinedStr):
        return "string"
    if (isinstance(node, ast.UnaryOp)
            and isinstance(node.op, (ast.USub, ast.UAdd))
            and isinstance(node.operand, ast.Constant)
            and isinstance(node.operand.value, (int, float))
            and not isinstance(node.operand.value, bool)):
        return "float" if isinstance(node.operand.value, float) else "int"
    if isinstance(node, ast.Call):
        if isinstance(node.func, ast.Name):
            by_builtin = {"float": "float", "int": "int", "str": "string", "bool": "bool"}
            if node.func.id in by_builtin:
                return by_builtin[node.func.id]
        return "call-result"
    return "other"


def _target_names(target: ast.AST) -> list[ast.Name]:
    if isinstance(target, ast.Name):
        return [target]
    if isinstance(target, (ast.Tuple, ast.List)):
        names = []
        for element in target.elts:
            names.extend(_target_names(element))
        return names
    if isinstance(target, ast.Starred):
        return _target_names(target.value)
    return []  # subscripts/attributes are not plain identifiers


class _IdentifierCollector(ast.NodeVisitor):
    def __init__(self, text: str):
        self.text = text
        self.order: list[str] = []
        self.kinds: dict[str, str] = {}
        self.first_lines: dict[str, int] = {}
        self.values: dict[str, list[tuple[str, str]]] = {}

    def _record(self, name: str, kind: str, line: int,
                value: tuple[str, str] | None = None) -> None:
        if name not in self.kinds:
            self.order.append(name)
            self.kinds[name] = kind
            self.first_lines[name] = line
            self.values[name] = []
        elif _KIND_RANK[kind] > _KIND_RANK[self.kinds[name]]:
            self.kinds[name] = kind
        if value is not None:
            self.values[name].append(value)

    def _record_assignment(self, targets: list[ast.AST], value: ast.AST) -> None:
        entry = (_expr_text(self.text, value), _infer_kind(value))
        for target in targets:
            for name_node in _target_names(target):
                self._record(name_node.id, VARIABLE, name_node.lineno, entry)

    def visit_FunctionDef(self, node: ast.FunctionDef) -> None:
        self._record(node.name, FUNCTION, node.lineno)
        args = node.args
        for arg in [*args.posonlyargs, *args.args, *args.kwonlyargs]:
            self._record(arg.arg, PARAMETER, arg.lineno)
        for extra in (args.vararg, args.kwarg):
            if extra is not None:
                self._record(extra.arg, PARAMETER, extra.lineno)
        self.generic_visit(node)

    visit_AsyncFunctionDef = visit_FunctionDef

    def visit_Assign(self, node: ast.Assign) -> None:
        self._record_assignment(list(node.targets), node.value)
        self.generic_visit(node)

    def visit_AnnAssign(self, node: ast.AnnAssign) -> None:
        if node.value is not None:
            self._record_assignment([node.target], node.value)
        self.generic_visit(node)

    def visit_AugAssign(self, node: ast.AugAssign) -> None:
        self._record_assignment([node.target], node.value)
        self.generic_visit(node)

    def visit_For(self, node: ast.For) -> None:
        self._record_assignment([node.target], node.iter)
        self.generic_visit(node)

    def visit_NamedExpr(self, node: ast.NamedExpr) -> None:
        self._record_assignment([node.target], node.value)
        self.generic_visit(node)


def _collect_identifiers(tree: ast.Module, text: str) -> list[IdentifierFact]:
    collector = _IdentifierCollector(text)
    collector.visit(tree)
    facts = []
    for name in collector.order:
        facts.append(
            IdentifierFact(
                name=name,
                kind=collector.kinds[name],
                first_line=collector.first_lines[name],
                assigned_values=tuple(collector.values[name]),
            )
        )
    return facts


# --- numeric literals ----------------------------------------------------------


def _collect_numeric_literals(tree: ast.Module) -> list[tuple[str, int, str]]:
    out: list[tuple[str, int, str]] = []

    def walk(node: ast.AST, scope: str) -> None:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            scope = node.name
        if (isinstance(node, ast.UnaryOp)
                and isinstance(node.op, (ast.USub, ast.UAdd))
                and isinstance(node.operand, ast.Constant)
                and isinstance(node.operand.value, (int, float))
                and not isinstance(node.operand.value, bool)):
            value = node.operand.value
            if isinstance(node.op, ast.USub):
                value = -value
            out.append((repr(value), node.operand.lineno, scope))
            return  # literal consumed; do not also record the bare operand
        if (isinstance(node, ast.Constant)
                and isinstance(node.value, (int, float))
                and not isinstance(node.value, bool)):
            out.append((repr(node.value), node.lineno, scope))
        for child in ast.iter_child_nodes(node):
            walk(child, scope)

    walk(tree, MODULE_SCOPE)
    return out


# --- module constants ------------------------------------------------------------


def _literal_repr(node: ast.AST) -> str | None:
    """repr of a literal value node, or None when the node is not a literal."""
    if isinstance(node, ast.Constant):
        return repr(node.value)
    if (isinstance(node, ast.UnaryOp)
            and isinstance(node.op, (ast.USub, ast.UAdd))
            and isinstance(node.operand, ast.Constant)
            and isinstance(node.operand.value, (int, float))
            and not isinstance(node.operand.value, bool)):
        value = node.operand.value
        if isinstance(node.op, ast.USub):
            value = -value
        return repr(value)
    return None


def _module_stores(tree: ast.Module):
    """Yield (name, value node or None, simple flag, line) per module-level store."""
    for stmt in tree.body:
        if isinstance(stmt, ast.Assign):
            names = []
            for target in stmt.targets:
                names.extend(_target_names(target))
            simple = len(stmt.targets) == 1 and isinstance(stmt.targets[0], ast.Name)
            for name_node in names:
                yield name_node.id, stmt.value, simple, stmt.lineno
        elif isinstance(stmt, ast.AnnAssign) and isinstance(stmt.target, ast.Name):
            if stmt.value is not None:
                yield stmt.target.id, stmt.value, True, stmt.lineno
        elif isinstance(stmt, ast.AugAssign) and isinstance(stmt.target, ast.Name):
            yield stmt.target.id, None, False, stmt.lineno
        elif isinstance(stmt, ast.For):
            for name_node in _target_names(stmt.target):
                yield name_node.id, None, False, stmt.lineno


def _function_bound_names(fn: ast.FunctionDef) -> set[str]:
    bound: set[str] = set()
    args = fn.args
    for arg in [*args.posonlyargs, *args.args, *args.kwonlyargs]:
        bound.add(arg.arg)
    for extra in (args.vararg, args.kwarg):
        if extra is not None:
            bound.add(extra.arg)
    for node in ast.walk(fn):
        if node is fn:
            continue
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            bound.add(node.name)
        elif isinstance(node, ast.Name) and isinstance(node.ctx, ast.Store):
            bound.add(node.id)
    return bound


def _module_read_counts(tree: ast.Module) -> dict[str, int]:
    """Count Name loads that resolve to module scope (locals shadow them)."""
    counts: dict[str, int] = {}

    def walk(node: ast.AST, shadowed: tuple[frozenset[str], ...]) -> None:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            shadowed = shadowed + (frozenset(_function_bound_names(node)),)
        elif isinstance(node, ast.Name) and isinstance(node.ctx, ast.Load):
            if not any(node.id in frame for frame in shadowed):
                counts[node.id] = counts.get(node.id, 0) + 1
        for child in ast.iter_child_nodes(node):
            walk(child, shadowed)

    walk(tree, ())
    return counts


def _collect_module_constants(tree: ast.Module) -> tuple[list[ModuleConstant], set[int]]:
    stores: dict[str, list[tuple[ast.AST | None, bool, int]]] = {}
    order: list[str] = []
    for name, value, simple, line in _module_stores(tree):
        if name not in stores:
            stores[name] = []
            order.append(name)
        stores[name].append((value, simple, line))

    reads = _module_read_counts(tree)
    constants: list[ModuleConstant] = []
    def_lines: set[int] = set()
    for name in order:
        first_value, first_simple, first_line = stores[name][0]
        first_literal = _literal_repr(first_value) if first_simple and first_value is not None else None
        if first_literal is None:
            continue
        for value, simple, _line in stores[name]:
            if simple and value is not None and _literal_repr(value) is not None:
                literal = value.operand if isinstance(value, ast.UnaryOp) else value
                def_lines.add(literal.lineno)
        constants.append(
            ModuleConstant(
                name=name,
                line=first_line,
                value=first_literal,
                is_uppercase=name.isupper(),
                read_count=reads.get(name, 0),
                reassignment_count=len(stores[name]) - 1,
            )
        )
    return constants, def_lines
