"""Session state: one user query's full lifecycle."""
from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Optional

from ..chain.nodes import ReasoningTree
from ..operators.clarifying import FlaggedQuestionRegistry
from ..operators.grouping import SegmentationResult
from ..operators.linking import LinkMap
from .events import EventKind, SessionEvent


class Phase(str, Enum):
    ASKING = "asking"
    REASONING = "reasoning"
    STRUCTURING = "structuring"
    TREE_READY = "tree_ready"
    ANSWERING = "answering"
    ANSWERED = "answered"

EDITABLE_PHASES = (Phase.STRUCTURING, Phase.TREE_READY, Phase.ANSWERED)


def new_session_id() -> str:
    return uuid.uuid4().hex[:12]


@dataclass
class Session:
    id: str
    user_prompt: str
    phase: Phase = Phase.ASKING
    raw_think: str = ""
    segments: Optional[SegmentationResult] = None
    tree: ReasoningTree = field(default_factory=ReasoningTree)
    registry: FlaggedQuestionRegistry = field(default_factory=FlaggedQuestionRegistry)
    paused: bool = False
    pending_feedback: Optional[int] = None
    answer: Optional[str] = None
    answer_units: list[tuple[int, str]] = field(default_factory=list)
    links: Optional[LinkMap] = None
    events: list[SessionEvent] = field(default_factory=list)
    next_node_id: int = 1
    diagnostics: list[dict] = field(default_factory=list)
    last_access: float = field(default_factory=time.time)
    generator: Optional[Iterator] = field(default=None, repr=False, compare=False)
    pumping: bool = field(default=False, repr=False, compare=False)

    def touch(self) -> None:
        self.last_access = time.time()

    def append_event(self, kind: EventKind, payload: dict[str, Any]) -> SessionEvent:
        event = SessionEvent(seq=len(self.events), kind=kind, payload=payload)
        self.events.append(event)
        self.touch()
        return event

    def events_from(self, seq: int) -> list[SessionEvent]:
        return [e for e in self.events if e.seq >= seq]

    def awaiting_feedback_ids(self) -> list[int]:
        from ..chain.nodes import NodeStatus
        return [n.id for n in self.tree.walk() if n.status is NodeStatus.AWAITING_FEEDBACK]

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "user_prompt": self.user_prompt,
            "phase": self.phase.value,
            "raw_think": self.raw_think,
            "segments": None if self.segments is None else {
                "segments": list(self.segments.segments),
                "preservation_score": self.segments.preservation_score,
            },
            "tree": self.tree.to_dict(),
            "registry": self.registry.to_dict(),
            "paused": self.paused,
            "pending_feedback": self.pending_feedback,
            "answer": self.answer,
            "answer_units": [[i, t] for i, t in self.answer_units],
            "links": None if self.links is None else self.links.to_dict(),
            "events": [e.to_dict() for e in self.events],
            "next_node_id": self.next_node_id,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Session":
        segments = None
        if data.get("segments"):
            segments = SegmentationResult(
                tuple(data["segments"]["segments"]),
                float(data["segments"]["preservation_score"]),
            )
        return cls(
            id=data["id"],
            user_prompt=data["user_prompt"],
            phase=Phase(data.get("phase", "asking")),
            raw_think=data.get("raw_think", ""),
            segments=segments,
            tree=ReasoningTree.from_dict(data.get("tree", {})),
            registry=FlaggedQuestionRegistry.from_dict(data.get("registry", [])),
            paused=bool(data.get("paused", False)),
            pending_feedback=data.get("pending_feedback"),
            answer=data.get("answer"),
            answer_units=[(int(i), t) for i, t in data.get("answer_units", [])],
            links=LinkMap.from_dict(data["links"]) if data.get("links") else None,
            events=[SessionEvent.from_dict(e) for e in data.get("events", [])],
            next_node_id=int(data.get("next_node_id", 1)),
            diagnostics=list(data.get("diagnostics", [])),
        )
