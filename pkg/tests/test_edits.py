from __future__ import annotations

import pytest

from reasonweave.chain import (
    AnswerFeedback,
    Collapse,
    Delete,
    Expand,
    InsertChild,
    InvalidTargetError,
    NodeKind,
    NodeStatus,
    Provenance,
    ReasoningNode,
    SetText,
    SkipFeedback,
    UnknownIdError,
    apply_edit,
    parse_tagged,
)
from helpers import APPENDIX_CLARIFIED, same_forest


@pytest.fixture
def tree():
    t, _ = parse_tagged(APPENDIX_CLARIFIED)
    return t


def budget_id(tree):
    return tree.roots[1].children[1].id


def test_set_text_changes_one_node_only(tree):
    target = tree.roots[0].id
    edited = apply_edit(tree, SetText(target, "new text"))
    assert edited.find(target).text == "new text"
    assert edited.find(target).provenance is Provenance.USER_EDITED
    assert [n.id for n in edited.walk()] == [n.id for n in tree.walk()]
    unchanged = [n for n in edited.walk() if n.id != target]
    originals = {n.id: n for n in tree.walk()}
    assert all(n.text == originals[n.id].text for n in unchanged)


def test_set_text_rejects_empty(tree):
    with pytest.raises(InvalidTargetError):
        apply_edit(tree, SetText(tree.roots[0].id, "   "))


def test_delete_removes_whole_subtree(tree):
    wrapper = tree.roots[1].children[0]
    removed = len(list(wrapper.walk()))
    assert removed == 7
    edited = apply_edit(tree, Delete(wrapper.id))
    assert edited.node_count() == tree.node_count() - removed


def test_delete_root(tree):
    edited = apply_edit(tree, Delete(tree.roots[0].id))
    assert len(edited.roots) == 1


def test_delete_unknown_id(tree):
    with pytest.raises(UnknownIdError):
        apply_edit(tree, Delete(9999))


def test_insert_child_at_index(tree):
    parent = tree.roots[0].id
    node = ReasoningNode(id=500, kind=NodeKind.BRANCH, text="inserted",
                         provenance=Provenance.USER_ADDED)
    edited = apply_edit(tree, InsertChild(parent, 0, node))
    assert edited.find(parent).children[0].id == 500


def test_insert_rejects_topic_child(tree):
    node = ReasoningNode(id=500, kind=NodeKind.TOPIC, text="nope")
    with pytest.raises(InvalidTargetError):
        apply_edit(tree, InsertChild(tree.roots[0].id, 0, node))


def test_insert_rejects_duplicate_id(tree):
    node = ReasoningNode(id=1, kind=NodeKind.BRANCH, text="dup")
    with pytest.raises(InvalidTargetError):
        apply_edit(tree, InsertChild(tree.roots[0].id, 0, node))


def test_insert_index_out_of_range(tree):
    node = ReasoningNode(id=500, kind=NodeKind.BRANCH, text="x")
    with pytest.raises(InvalidTargetError):
        apply_edit(tree, InsertChild(tree.roots[0].id, 5, node))


def test_collapse_then_expand_is_identity(tree):
    target = tree.roots[1].children[0].id
    collapsed = apply_edit(tree, Collapse(target, "a short summary"))
    assert target in collapsed.collapsed
    node = collapsed.find(target)
    assert node.children[0].kind is NodeKind.SUMMARY
    assert node.children[0].provenance is Provenance.SUMMARY_DERIVED
    assert node.status is NodeStatus.COLLAPSED
    expanded = apply_edit(collapsed, Expand(target))
    assert same_forest(expanded, tree)
    assert expanded.collapsed == tree.collapsed


def test_collapse_leaf_rejected(tree):
    leaf = tree.roots[0].id
    with pytest.raises(InvalidTargetError):
        apply_edit(tree, Collapse(leaf, "s"))


def test_answer_feedback(tree):
    target = budget_id(tree)
    edited = apply_edit(tree, AnswerFeedback(target, "Under $1500"))
    node = edited.find(target)
    assert node.status is NodeStatus.ANSWERED
    assert node.feedback_answer == "Under $1500"


def test_answer_feedback_on_branch_rejected(tree):
    branch = tree.roots[1].children[0].children[0].id
    with pytest.raises(InvalidTargetError):
        apply_edit(tree, AnswerFeedback(branch, "answer"))


def test_answer_feedback_twice_rejected(tree):
    target = budget_id(tree)
    edited = apply_edit(tree, AnswerFeedback(target, "first"))
    with pytest.raises(InvalidTargetError):
        apply_edit(edited, AnswerFeedback(target, "second"))


def test_skip_feedback(tree):
    target = budget_id(tree)
    edited = apply_edit(tree, SkipFeedback(target))
    assert edited.find(target).status is NodeStatus.SKIPPED
    assert edited.find(target).feedback_answer is None


def test_edits_do_not_mutate_input(tree):
    before = tree.to_dict()
    apply_edit(tree, SetText(tree.roots[0].id, "mutated?"))
    apply_edit(tree, Delete(tree.roots[0].id))
    assert tree.to_dict() == before


def test_wire_format_round_trip(tree):
    from reasonweave.chain import ReasoningTree
    doc = tree.to_dict()
    assert ReasoningTree.from_dict(doc) == tree
