"""Tree types for structured reasoning chains.

Trees are immutable values: every mutation produces a new tree. Node ids
are integers, unique within a tree and stable across edits.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, Optional


class NodeKind(str, Enum):
    TOPIC = "topic"
    BRANCH = "branch"
    FEEDBACK = "feedback"
    SUMMARY = "summary"


class NodeStatus(str, Enum):
    GENERATING = "generating"
    COMPLETE = "complete"
    AWAITING_FEEDBACK = "awaiting_feedback"
    ANSWERED = "answered"
    SKIPPED = "skipped"
    COLLAPSED = "collapsed"


class Provenance(str, Enum):
    MODEL_EMITTED = "model_emitted"
    USER_ADDED = "user_added"
    USER_EDITED = "user_edited"
    REGENERATED = "regenerated"
    SUMMARY_DERIVED = "summary_derived"


@dataclass(frozen=True)
class ReasoningNode:
    """One unit of reasoning: a topic, a branch, a feedback question, or a summary."""

    id: int
    kind: NodeKind
    text: str
    children: tuple["ReasoningNode", ...] = ()
    status: NodeStatus = NodeStatus.COMPLETE
    feedback_answer: Optional[str] = None
    provenance: Provenance = Provenance.MODEL_EMITTED

    def walk(self) -> Iterator["ReasoningNode"]:
        """Yield this node and all descendants in preorder."""
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "text": self.text,
            "status": self.status.value,
            "feedback_answer": self.feedback_answer,
            "provenance": self.provenance.value,
            "children": [child.to_dict() for child in self.children],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ReasoningNode":
        return cls(
            id=int(data["id"]),
            kind=NodeKind(data["kind"]),
            text=data["text"],
            children=tuple(cls.from_dict(c) for c in data.get("children", [])),
            status=NodeStatus(data.get("status", "complete")),
            feedback_answer=data.get("feedback_answer"),
            provenance=Provenance(data.get("provenance", "model_emitted")),
        )


@dataclass(frozen=True)
class ReasoningTree:
    """A forest of topic roots plus the set of node ids currently collapsed."""

    roots: tuple[ReasoningNode, ...] = ()
    collapsed: frozenset[int] = frozenset()

    def walk(self) -> Iterator[ReasoningNode]:
        for root in self.roots:
            yield from root.walk()

    def find(self, node_id: int) -> Optional[ReasoningNode]:
        for node in self.walk():
            if node.id == node_id:
                return node
        return None

    def parent_of(self, node_id: int) -> Optional[ReasoningNode]:
        for node in self.walk():
            for child in node.children:
                if child.id == node_id:
                    return node
        return None

    def path_to(self, node_id: int) -> tuple[ReasoningNode, ...]:
        """Root-to-node chain for ``node_id``, or () if the id is unknown."""

        def descend(node: ReasoningNode, trail: tuple[ReasoningNode, ...]):
            trail = trail + (node,)
            if node.id == node_id:
                return trail
            for child in node.children:
                found = descend(child, trail)
                if found:
                    return found
            return ()

        for root in self.roots:
            found = descend(root, ())
            if found:
                return found
        return ()

    def node_count(self) -> int:
        return sum(1 for _ in self.walk())

    def max_id(self) -> int:
        return max((node.id for node in self.walk()), default=0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "roots": [root.to_dict() for root in self.roots],
            "collapsed": sorted(self.collapsed),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ReasoningTree":
        return cls(
            roots=tuple(ReasoningNode.from_dict(r) for r in data.get("roots", [])),
            collapsed=frozenset(int(i) for i in data.get("collapsed", [])),
        )


def normalize_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends.

    This is the equality notion used by every text-preservation check:
    tag removal perturbs spacing, so exact byte equality is never required.
    """
    return " ".join(text.split())


def preorder_text(tree: ReasoningTree) -> str:
    """Whitespace-normalized concatenation of every node text, in preorder."""
    return normalize_ws(" ".join(node.text for node in tree.walk()))
