from .nodes import (
    NodeKind,
    NodeStatus,
    Provenance,
    ReasoningNode,
    ReasoningTree,
    normalize_ws,
    preorder_text,
)
from .parser import (
    MAX_DEPTH,
    DiagnosticSeverity,
    NodeClosed,
    NodeEvent,
    NodeOpened,
    NodeText,
    ParseDiagnostic,
    StreamParser,
    parse_tagged,
    strip_tags,
)
from .serialize import (
    ANSWER_OPEN,
    CLARIFICATION_PREFIX,
    THINK_CLOSE,
    THINK_OPEN,
    ThinkEnvelope,
    regeneration_prompt,
    serialize_think,
)
from .edits import (
    AnswerFeedback,
    Collapse,
    Delete,
    Edit,
    EditError,
    Expand,
    InsertChild,
    InvalidTargetError,
    SetText,
    SkipFeedback,
    UnknownIdError,
    apply_edit,
    replace_node,
)

__all__ = [
    "NodeKind", "NodeStatus", "Provenance", "ReasoningNode", "ReasoningTree",
    "normalize_ws", "preorder_text",
    "MAX_DEPTH", "DiagnosticSeverity", "NodeClosed", "NodeEvent", "NodeOpened",
    "NodeText", "ParseDiagnostic", "StreamParser", "parse_tagged", "strip_tags",
    "ANSWER_OPEN", "CLARIFICATION_PREFIX", "THINK_CLOSE", "THINK_OPEN",
    "ThinkEnvelope", "regeneration_prompt", "serialize_think",
    "AnswerFeedback", "Collapse", "Delete", "Edit", "EditError", "Expand",
    "InsertChild", "InvalidTargetError", "SetText", "SkipFeedback",
    "UnknownIdError", "apply_edit", "replace_node",
]
