"""Edits over reasoning trees.

apply_edit is pure: it returns a new tree and never mutates its input.
Every precondition violation raises UnknownIdError or InvalidTargetError
naming what was violated.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from .nodes import NodeKind, NodeStatus, Provenance, ReasoningNode, ReasoningTree


class EditError(Exception):
    pass


class UnknownIdError(EditError):
    def __init__(self, node_id: int):
        super().__init__(f"unknown node id {node_id}")
        self.node_id = node_id


class InvalidTargetError(EditError):
    pass


@dataclass(frozen=True)
class SetText:
    node_id: int
    text: str


@dataclass(frozen=True)
class Delete:
    node_id: int


@dataclass(frozen=True)
class InsertChild:
    parent_id: int
    index: int
    node: ReasoningNode


@dataclass(frozen=True)
class Collapse:
    node_id: int
    summary_text: str


@dataclass(frozen=True)
class Expand:
    node_id: int


@dataclass(frozen=True)
class AnswerFeedback:
    node_id: int
    answer: str


@dataclass(frozen=True)
class SkipFeedback:
    node_id: int


Edit = Union[SetText, Delete, InsertChild, Collapse, Expand, AnswerFeedback, SkipFeedback]


def _rewrite(node: ReasoningNode, node_id: int, fn) -> ReasoningNode:
    if node.id == node_id:
        return fn(node)
    return replace(node, children=tuple(_rewrite(c, node_id, fn) for c in node.children))


def replace_node(tree: ReasoningTree, node_id: int, fn) -> ReasoningTree:
    """Apply fn to the node with the given id, path-copying to the roots."""
    if tree.find(node_id) is None:
        raise UnknownIdError(node_id)
    return replace(tree, roots=tuple(_rewrite(r, node_id, fn) for r in tree.roots))


def _without(node: ReasoningNode, node_id: int) -> ReasoningNode:
    kept = tuple(_without(c, node_id) for c in node.children if c.id != node_id)
    return replace(node, children=kept)


def apply_edit(tree: ReasoningTree, edit: Edit) -> ReasoningTree:
    if isinstance(edit, SetText):
        if not edit.text.strip():
            raise InvalidTargetError("SetText requires non-empty text")
        return replace_node(
            tree, edit.node_id,
            lambda n: replace(n, text=edit.text, provenance=Provenance.USER_EDITED),
        )

    if isinstance(edit, Delete):
        target = tree.find(edit.node_id)
        if target is None:
            raise UnknownIdError(edit.node_id)
        removed = {n.id for n in target.walk()}
        roots = tuple(_without(r, edit.node_id) for r in tree.roots if r.id != edit.node_id)
        collapsed = frozenset(i for i in tree.collapsed if i not in removed)
        # a collapsed node whose summary child was just removed is expanded again
        parent = tree.parent_of(edit.node_id)
        if parent is not None and target.kind is NodeKind.SUMMARY:
            collapsed = collapsed - {parent.id}
        return ReasoningTree(roots=roots, collapsed=collapsed)

    if isinstance(edit, InsertChild):
        parent = tree.find(edit.parent_id)
        if parent is None:
            raise UnknownIdError(edit.parent_id)
        if edit.index < 0 or edit.index > len(parent.children):
            raise InvalidTargetError(
                f"insert index {edit.index} out of range for {len(parent.children)} children")
        if edit.node.kind is NodeKind.TOPIC:
            raise InvalidTargetError("topic nodes may appear only at the top level")
        if tree.find(edit.node.id) is not None:
            raise InvalidTargetError(f"node id {edit.node.id} already exists in the tree")
        if edit.node.kind is NodeKind.SUMMARY and edit.node.children:
            raise InvalidTargetError("summary nodes have no children")

        def insert(n: ReasoningNode) -> ReasoningNode:
            kids = list(n.children)
            kids.insert(edit.index, edit.node)
            return replace(n, children=tuple(kids))

        return replace_node(tree, edit.parent_id, insert)

    if isinstance(edit, Collapse):
        target = tree.find(edit.node_id)
        if target is None:
            raise UnknownIdError(edit.node_id)
        if not target.children:
            raise InvalidTargetError("collapse requires a node with at least one child")
        if edit.node_id in tree.collapsed:
            raise InvalidTargetError(f"node {edit.node_id} is already collapsed")
        summary = ReasoningNode(
            id=tree.max_id() + 1,
            kind=NodeKind.SUMMARY,
            text=edit.summary_text,
            status=NodeStatus.COMPLETE,
            provenance=Provenance.SUMMARY_DERIVED,
        )

        def collapse(n: ReasoningNode) -> ReasoningNode:
            status = n.status if n.kind is NodeKind.FEEDBACK else NodeStatus.COLLAPSED
            return replace(n, children=(summary,) + n.children, status=status)

        new_tree = replace_node(tree, edit.node_id, collapse)
        return replace(new_tree, collapsed=new_tree.collapsed | {edit.node_id})

    if isinstance(edit, Expand):
        target = tree.find(edit.node_id)
        if target is None:
            raise UnknownIdError(edit.node_id)
        if edit.node_id not in tree.collapsed:
            raise InvalidTargetError(f"node {edit.node_id} is not collapsed")

        def expand(n: ReasoningNode) -> ReasoningNode:
            kids = tuple(c for c in n.children if c.kind is not NodeKind.SUMMARY)
            status = n.status if n.kind is NodeKind.FEEDBACK else NodeStatus.COMPLETE
            return replace(n, children=kids, status=status)

        new_tree = replace_node(tree, edit.node_id, expand)
        return replace(new_tree, collapsed=new_tree.collapsed - {edit.node_id})

    if isinstance(edit, AnswerFeedback):
        target = tree.find(edit.node_id)
        if target is None:
            raise UnknownIdError(edit.node_id)
        if target.kind is not NodeKind.FEEDBACK:
            raise InvalidTargetError("only feedback nodes accept an answer")
        if target.status is not NodeStatus.AWAITING_FEEDBACK:
            raise InvalidTargetError(f"node {edit.node_id} is not awaiting feedback")
        if not edit.answer.strip():
            raise InvalidTargetError("feedback answer must be non-empty")
        return replace_node(
            tree, edit.node_id,
            lambda n: replace(n, status=NodeStatus.ANSWERED, feedback_answer=edit.answer),
        )

    if isinstance(edit, SkipFeedback):
        target = tree.find(edit.node_id)
        if target is None:
            raise UnknownIdError(edit.node_id)
        if target.kind is not NodeKind.FEEDBACK:
            raise InvalidTargetError("only feedback nodes can be skipped")
        if target.status is not NodeStatus.AWAITING_FEEDBACK:
            raise InvalidTargetError(f"node {edit.node_id} is not awaiting feedback")
        return replace_node(
            tree, edit.node_id, lambda n: replace(n, status=NodeStatus.SKIPPED))

    raise TypeError(f"unknown edit {edit!r}")
