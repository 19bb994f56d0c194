"""Session event log: the ordered, replayable record every client consumes."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any


class EventKind(str, Enum):
    NODE_ADDED = "node_added"
    NODE_TEXT_DELTA = "node_text_delta"
    NODE_COMPLETED = "node_completed"
    FEEDBACK_REQUIRED = "feedback_required"
    NODE_UPDATED = "node_updated"
    NODE_REMOVED = "node_removed"
    GENERATION_PAUSED = "generation_paused"
    GENERATION_RESUMED = "generation_resumed"
    TREE_COMPLETE = "tree_complete"
    ANSWER_DELTA = "answer_delta"
    ANSWER_COMPLETE = "answer_complete"
    LINKS_READY = "links_ready"
    LINKS_UNAVAILABLE = "links_unavailable"
    ERROR = "error"

PAUSE_MARKERS = {EventKind.GENERATION_PAUSED, EventKind.GENERATION_RESUMED}


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    kind: EventKind
    payload: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "kind": self.kind.value, "payload": self.payload}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SessionEvent":
        return cls(seq=int(data["seq"]), kind=EventKind(data["kind"]),
                   payload=dict(data.get("payload", {})))
