"""Serialize a reasoning tree back into linear thinking text.

The output is tag-free: preorder node texts separated by blank lines,
with answered feedback questions optionally followed by an explicit
"User clarification:" line so the regeneration prompt stays unambiguous.
"""
from __future__ import annotations

from dataclasses import dataclass

from .nodes import NodeKind, NodeStatus, ReasoningNode, ReasoningTree

CLARIFICATION_PREFIX = "User clarification: "
THINK_OPEN = "<think>"
THINK_CLOSE = "</think>"
ANSWER_OPEN = "<answer>"


def serialize_think(tree: ReasoningTree, *, include_summaries: bool = False,
                    include_feedback_answers: bool = False) -> str:
    """Linearize the tree in preorder.

    Summary nodes appear only when ``include_summaries`` is set and their
    parent is collapsed, in which case the collapsed node's other
    descendants are omitted. Deleted nodes are simply absent from the
    tree; skipped feedback contributes its question text only.
    """
    blocks: list[str] = []

    def emit(node: ReasoningNode) -> None:
        if node.kind is NodeKind.SUMMARY:
            return
        if node.text:
            block = node.text
            if (include_feedback_answers and node.kind is NodeKind.FEEDBACK
                    and node.status is NodeStatus.ANSWERED and node.feedback_answer):
                block = f"{block}\n{CLARIFICATION_PREFIX}{node.feedback_answer}"
            blocks.append(block)
        if node.id in tree.collapsed and include_summaries:
            for child in node.children:
                if child.kind is NodeKind.SUMMARY and child.text:
                    blocks.append(child.text)
                    break
            return
        for child in node.children:
            emit(child)

    for root in tree.roots:
        emit(root)
    return "\n\n".join(blocks)


@dataclass(frozen=True)
class ThinkEnvelope:
    """The delimited block wrapping reasoning text in a regeneration prompt."""

    original_prompt: str
    think_text: str
    open_delimiter: str = THINK_OPEN
    close_delimiter: str = THINK_CLOSE

    def render(self) -> str:
        """Assemble the full regeneration prompt.

        Shape: the user's prompt, the think envelope, then the open answer
        delimiter. Nothing else: no extra system text is added.
        """
        return (
            f"{self.original_prompt}\n\n"
            f"{self.open_delimiter}{self.think_text}{self.close_delimiter}\n\n"
            f"{ANSWER_OPEN}"
        )


def regeneration_prompt(user_prompt: str, tree: ReasoningTree, *,
                        include_summaries: bool = False) -> str:
    """Prompt that asks the reasoning model to re-answer from the edited tree."""
    think = serialize_think(
        tree,
        include_summaries=include_summaries,
        include_feedback_answers=True,
    )
    return ThinkEnvelope(user_prompt, think).render()
