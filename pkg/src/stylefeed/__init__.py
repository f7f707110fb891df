"""Real-time style feedback engine for beginner Python programs.

Deterministic lint rules plus schema-validated model feedback, delivered
through a gated, rate-limited session service with edit-impact analytics.
"""

from .config import EngineConfig, GroupWeights, RuleConfig, load_config
from .orchestrator import MockTransport
from .pipeline import generate_report
from .program_facts import SourceProgram, parse_program
from .report import FeedbackReport, render_text, report_from_dict, report_to_dict
from .service import Group, StyleFeedbackService, assign_group

__all__ = [
    "EngineConfig",
    "FeedbackReport",
    "Group",
    "GroupWeights",
    "MockTransport",
    "RuleConfig",
    "SourceProgram",
    "StyleFeedbackService",
    "assign_group",
    "generate_report",
    "load_config",
    "parse_program",
    "render_text",
    "report_from_dict",
    "report_to_dict",
]
