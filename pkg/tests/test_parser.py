from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from reasonweave.chain import (
    MAX_DEPTH,
    NodeKind,
    NodeOpened,
    NodeStatus,
    StreamParser,
    parse_tagged,
    preorder_text,
    strip_tags,
)
from helpers import (
    APPENDIX_CLARIFIED,
    APPENDIX_TAGGED,
    BUDGET_QUESTION,
    chunked,
    emit_tags,
    mutate_tagged,
    random_tree,
    same_forest,
)


def test_empty_input_is_empty_forest():
    tree, diags = parse_tagged("")
    assert tree.roots == ()
    assert diags == []


def test_whitespace_only_input():
    tree, diags = parse_tagged("  \n\t \n")
    assert tree.roots == ()
    assert diags == []


class TestCanonicalExample:
    def test_forest_shape(self):
        tree, _ = parse_tagged(APPENDIX_TAGGED)
        assert len(tree.roots) == 2
        assert all(r.kind is NodeKind.TOPIC for r in tree.roots)
        second = tree.roots[1]
        assert len(second.children) == 2
        wrapper = second.children[0]
        assert [len(c.children) for c in wrapper.children] == [1, 2, 0]
        beach = wrapper.children[0]
        assert beach.text.startswith("For beach destinations")
        assert beach.children[0].text.startswith("These spots are popular")
        more = wrapper.children[1]
        assert more.text.startswith("But maybe I should also include")
        assert [c.text.split()[0] for c in more.children] == ["Costa", "Hawaii"]
        budget = second.children[1]
        assert budget.text == BUDGET_QUESTION
        assert budget.kind is NodeKind.BRANCH

    def test_text_preservation(self):
        tree, _ = parse_tagged(APPENDIX_TAGGED)
        assert preorder_text(tree) == strip_tags(APPENDIX_TAGGED)

    def test_budget_question_becomes_feedback_after_clarify(self):
        tree, _ = parse_tagged(APPENDIX_CLARIFIED)
        budget = tree.roots[1].children[1]
        assert budget.kind is NodeKind.FEEDBACK
        assert budget.status is NodeStatus.AWAITING_FEEDBACK
        assert budget.text == BUDGET_QUESTION

    def test_ids_are_preorder_sequential(self):
        tree, _ = parse_tagged(APPENDIX_TAGGED)
        assert [n.id for n in tree.walk()] == list(range(1, tree.node_count() + 1))


class TestRecovery:
    def test_stray_text_becomes_topic(self):
        tree, diags = parse_tagged("loose thoughts with no tags")
        assert len(tree.roots) == 1
        assert tree.roots[0].kind is NodeKind.TOPIC
        assert tree.roots[0].text == "loose thoughts with no tags"
        assert any("untagged text" in d.message for d in diags)

    def test_unclosed_tags_closed_at_end(self):
        tree, diags = parse_tagged("<topic>alpha <branch>beta")
        assert tree.roots[0].text == "alpha"
        assert tree.roots[0].children[0].text == "beta"
        assert any("unclosed" in d.message for d in diags)

    def test_user_at_topic_level_demoted(self):
        tree, diags = parse_tagged("<topic>head<user>ask me</user></topic>")
        topic = tree.roots[0]
        assert topic.children[0].kind is NodeKind.FEEDBACK
        assert topic.children[0].text == "ask me"
        assert any("demoted" in d.message for d in diags)

    def test_nested_topic_reparented_to_top(self):
        tree, diags = parse_tagged("<topic>a<topic>b</topic>")
        assert [r.text for r in tree.roots] == ["a", "b"]
        assert all(r.kind is NodeKind.TOPIC for r in tree.roots)
        assert any("top level" in d.message for d in diags)

    def test_unmatched_close_dropped(self):
        tree, diags = parse_tagged("</branch>after")
        assert tree.roots[0].text == "after"
        assert any("unmatched" in d.message for d in diags)

    def test_orphan_branch_promoted_to_topic(self):
        tree, diags = parse_tagged("<branch>no topic before me</branch>")
        assert tree.roots[0].kind is NodeKind.TOPIC
        assert any("promoted" in d.message for d in diags)

    def test_top_level_branch_attaches_to_previous_topic(self):
        tree, _ = parse_tagged("<topic>root</topic><branch>child</branch>")
        assert len(tree.roots) == 1
        assert tree.roots[0].children[0].text == "child"

    def test_empty_elements_dropped(self):
        tree, diags = parse_tagged("<topic></topic><branch>  </branch>")
        assert tree.roots == ()
        assert sum("empty element" in d.message for d in diags) == 2

    def test_depth_cap_flattens(self):
        inner = "<branch>x" * 20 + "</branch>" * 20
        tree, diags = parse_tagged(f"<topic>t{inner}</topic>")
        assert max(len(tree.path_to(n.id)) for n in tree.walk()) <= MAX_DEPTH
        assert any("depth cap" in d.message for d in diags)
        assert preorder_text(tree) == strip_tags(f"<topic>t{inner}</topic>")

    def test_wrapped_branch_becomes_feedback(self):
        tree, _ = parse_tagged("<topic>t<branch><user>why?</user></branch></topic>")
        node = tree.roots[0].children[0]
        assert node.kind is NodeKind.FEEDBACK
        assert node.text == "why?"

    def test_user_after_content_becomes_feedback_child(self):
        tree, _ = parse_tagged("<topic>t<branch>lead <user>why?</user></branch></topic>")
        branch = tree.roots[0].children[0]
        assert branch.kind is NodeKind.BRANCH
        assert branch.text == "lead"
        assert branch.children[0].kind is NodeKind.FEEDBACK

    def test_text_after_children_keeps_document_order(self):
        tagged = "<topic>a<branch>b</branch>c<branch>d</branch></topic>"
        tree, _ = parse_tagged(tagged)
        assert preorder_text(tree) == "a b c d"


class TestRoundTrip:
    def test_fixed_seeds(self):
        rng = random.Random(7)
        for _ in range(50):
            tree = random_tree(rng)
            parsed, diags = parse_tagged(emit_tags(tree))
            assert diags == []
            assert same_forest(parsed, tree)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_property_round_trip(self, seed):
        tree = random_tree(random.Random(seed))
        parsed, diags = parse_tagged(emit_tags(tree))
        assert diags == []
        assert same_forest(parsed, tree)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_property_malformed_preserves_text(self, seed):
        rng = random.Random(seed)
        mutated = mutate_tagged(rng, emit_tags(random_tree(rng)))
        tree, _ = parse_tagged(mutated)
        assert preorder_text(tree) == strip_tags(mutated)


class TestIncremental:
    def test_single_chunk_equals_whole(self):
        whole, _ = parse_tagged(APPENDIX_TAGGED)
        p = StreamParser()
        p.feed(APPENDIX_TAGGED)
        _, tree, _ = p.finalize()
        assert tree == whole

    def test_ten_char_chunks_match(self):
        whole, _ = parse_tagged(APPENDIX_TAGGED)
        p = StreamParser()
        for i in range(0, len(APPENDIX_TAGGED), 10):
            p.feed(APPENDIX_TAGGED[i:i + 10])
        _, tree, _ = p.finalize()
        assert tree == whole

    def test_tag_split_across_chunks_no_diagnostic(self):
        p = StreamParser()
        p.feed("<to")
        p.feed("pic>hello</to")
        p.feed("pic>")
        _, tree, diags = p.finalize()
        assert tree.roots[0].text == "hello"
        assert diags == []

    def test_opened_events_are_preorder(self):
        rng = random.Random(11)
        for _ in range(20):
            text = emit_tags(random_tree(rng))
            p = StreamParser()
            events = []
            for chunk in chunked(rng, text):
                events += p.feed(chunk)
            tail, tree, _ = p.finalize()
            events += tail
            opened = [e.node_id for e in events if isinstance(e, NodeOpened)]
            assert opened == [n.id for n in tree.walk()]

    def test_random_chunkings_match_whole_parse(self):
        rng = random.Random(23)
        for _ in range(30):
            base = emit_tags(random_tree(rng))
            text = mutate_tagged(rng, base) if rng.random() < 0.5 else base
            whole, _ = parse_tagged(text)
            p = StreamParser()
            for chunk in chunked(rng, text):
                p.feed(chunk)
            _, tree, _ = p.finalize()
            assert tree == whole

    def test_text_deltas_concatenate_to_node_text(self):
        from reasonweave.chain import NodeText, normalize_ws
        p = StreamParser()
        events = list(p.feed(APPENDIX_TAGGED))
        tail, tree, _ = p.finalize()
        events += tail
        deltas: dict[int, str] = {}
        for e in events:
            if isinstance(e, NodeText):
                deltas[e.node_id] = deltas.get(e.node_id, "") + e.delta
        for node in tree.walk():
            assert normalize_ws(deltas.get(node.id, "")) == node.text


def test_feed_after_finalize_rejected():
    p = StreamParser()
    p.finalize()
    with pytest.raises(RuntimeError):
        p.feed("more")
