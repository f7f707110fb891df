"""Rebuild tests/data/traces_20.jsonl, the snapshot-trace corpus.

Only assembles program variants into trace records; the companion expected
table (traces_20_expected.json) is computed by hand and never by this script.
"""

from __future__ import annotations

import json
from pathlib import Path

BASE = (
    "def main():\n"
    "    raw = input(\"grams:\")\n"
    "    g = float(raw)\n"
    "    t = g * 28.35\n"
    "    t = t + 0.5\n"
    "    print(t)\n"
)


def _rename_t(text: str) -> str:
    return (text
            .replace("    t = g * 28.35", "    total_grams = g * 28.35")
            .replace("    t = t + 0.5", "    total_grams = total_grams + 0.5")
            .replace("print(t)", "print(total_grams)"))


RENAME_T = _rename_t(BASE)
RENAME_G_WRONG = BASE.replace("g = float(raw)", "value = float(raw)") \
                     .replace("t = g * 28.35", "t = value * 28.35")
COMMENT = BASE.replace("    t = t + 0.5",
                       "    # add the container weight\n    t = t + 0.5")
CONST = "GRAMS_PER_OUNCE = 28.35\n" + BASE.replace("g * 28.35", "g * GRAMS_PER_OUNCE")
CONST_COMMENT = CONST.replace("    t = g * GRAMS_PER_OUNCE",
                              "    # convert to ounces\n    t = g * GRAMS_PER_OUNCE")
COMBINED_EDIT = _rename_t(BASE).replace("+ 0.5", "+ 0.75")
FUNC = BASE.replace("+ 0.5", "+ 0.75").replace("    print(t)\n",
                                               "    print(t)\n    print(\"done\")\n")
FUNC2 = FUNC + "    print(raw)\n"
RENAME_T_FUNC = _rename_t(BASE).replace("+ 0.5", "+ 0.75") + "    print(\"done\")\n"
BROKEN = "def main(:\n    raw = input(\"grams:\")\n"
WHITESPACE = "".join(line + "  \n" for line in BASE.splitlines())

VIEWED_REPORT = {
    "problem_id": "p-ounces",
    "generated_at": "2026-02-02T10:00:00+00:00",
    "degraded": False,
    "sections": [
        {"category": "IdentifierNames", "items": [
            {"kind": "rename", "line": 3, "subject": "g",
             "suggestion": "grams", "text": "rename g to grams"},
            {"kind": "rename", "line": 4, "subject": "t",
             "suggestion": "total_grams", "text": "rename t to total_grams"},
        ]},
        {"category": "ConstantsAndMagicNumbers", "items": [
            {"kind": "magic_number", "line": 4, "subject": "28.35",
             "suggestion": "define an uppercase constant for 28.35",
             "text": "the number 28.35 appears directly in the code"},
        ]},
        {"category": "Comments", "items": [
            {"kind": "comment_suggestion", "line": 4, "subject": None,
             "suggestion": None, "text": "explain the conversion on line 4"},
        ]},
        {"category": "Decomposition", "items": [
            {"kind": "all_clear", "line": None, "subject": None,
             "suggestion": None, "text": "functions are a manageable size"},
        ]},
    ],
    "diagnostics": {},
}

# (student, viewer, [(source, tests_passed), ...])
TRACES = [
    ("t01", True, [(BASE, True)]),
    ("t02", False, [(BASE, True)]),
    ("t03", True, [(BASE, True), (RENAME_T, True)]),
    ("t04", True, [(BASE, True), (COMMENT, True)]),
    ("t05", True, [(BASE, True), (CONST, True)]),
    ("t06", True, [(BASE, True), (COMBINED_EDIT, True)]),
    ("t07", True, [(BASE, True), (FUNC, True)]),
    ("t08", False, [(BASE, True), (FUNC, True)]),
    ("t09", False, [(BASE, True), (RENAME_T, True)]),
    ("t10", True, [(BASE, True), (RENAME_G_WRONG, True)]),
    ("t11", True, [(BASE, True), (WHITESPACE, True)]),
    ("t12", False, [(BASE, False)]),
    ("t13", True, [(BASE, False), (BASE, True)]),
    ("t14", False, [(BASE, False), (BASE, True), (FUNC, True)]),
    ("t15", True, [(BASE, True), (BROKEN, True)]),
    ("t16", True, [(BASE, True), (CONST, True), (CONST_COMMENT, True)]),
    ("t17", False, [(BASE, True), (COMMENT, True)]),
    ("t18", True, [(BASE, True), (FUNC, True), (FUNC2, True)]),
    ("t19", True, [(BASE, True), (RENAME_T, True), (RENAME_T_FUNC, True)]),
    ("t20", False, [(BASE, True), (WHITESPACE, True)]),
]


def build() -> str:
    lines = []
    for student, viewer, snapshots in TRACES:
        record = {
            "student_id": student,
            "problem_id": "p-ounces",
            "snapshots": [
                {
                    "at": f"2026-02-02T10:{20 * i:02d}:00+00:00",
                    "source": source,
                    "tests_passed": passed,
                }
                for i, (source, passed) in enumerate(snapshots)
            ],
            "reports_viewed": (
                [{"at": "2026-02-02T10:05:00+00:00", "report": VIEWED_REPORT}]
                if viewer else []
            ),
        }
        lines.append(json.dumps(record))
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    out = Path(__file__).parent.parent / "tests" / "data" / "traces_20.jsonl"
    out.write_text(build(), encoding="utf-8")
    print(f"wrote {out}")
