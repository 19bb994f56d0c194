"""Shared test helpers: canonical fixtures, an independent tag emitter, and
random tree/mutation generators for round-trip fuzzing.

``emit_tags`` is the inverse serializer used only by tests; it was written
against the tag grammar directly, not against the parser, so round trips
check the parser against an independent implementation.
"""
from __future__ import annotations

import random

from reasonweave.chain import (
    NodeKind,
    NodeStatus,
    Provenance,
    ReasoningNode,
    ReasoningTree,
)

QUERY = "Where should I travel to during the spring break?"

APPENDIX_TAGGED = """<topic>Okay, the user is asking where they should travel during spring break. Hmm, I need to consider different types of destinations to cover various interests.</topic>

<topic>First, I should consider different destinations. I should list options that cater to different preferences.</topic>

<branch>
    <branch>For beach destinations, places like Cancun, Miami, or the Caribbean come to mind.
        <branch>These spots are popular for spring break because they offer warm weather, beaches, and vibrant nightlife.</branch>
    </branch>
    <branch>But maybe I should also include some less crowded beaches for those who prefer a quieter time.
        <branch>Costa Rica is known for eco-tourism, rainforests, and activities like zip-lining.</branch>
        <branch>Hawaii is another option with hiking and volcanoes.</branch>
    </branch>
    <branch>Cities with cultural attractions could be another category: places like Paris, Kyoto, or Barcelona. Oh, Kyoto in spring would have cherry blossoms, that's a big plus.</branch>
</branch>
<branch>Wait, what is the user's budget? I should include some budget-friendly options too.</branch>"""

BUDGET_QUESTION = "Wait, what is the user's budget? I should include some budget-friendly options too."

APPENDIX_CLARIFIED = APPENDIX_TAGGED.replace(
    f"<branch>{BUDGET_QUESTION}</branch>",
    f"<branch><user>{BUDGET_QUESTION}</user></branch>",
)

RAW_CHAIN = (
    "Okay, the user is asking where they should travel during spring break. "
    "Hmm, I need to consider different types of destinations to cover various interests.\n\n"
    "First, I should consider different destinations. "
    "I should list options that cater to different preferences.\n\n"
    "For beach destinations, places like Cancun, Miami, or the Caribbean come to mind. "
    "These spots are popular for spring break because they offer warm weather, beaches, "
    "and vibrant nightlife. But maybe I should also include some less crowded beaches "
    "for those who prefer a quieter time. Costa Rica is known for eco-tourism, "
    "rainforests, and activities like zip-lining. Hawaii is another option with hiking "
    "and volcanoes. Cities with cultural attractions could be another category: places "
    "like Paris, Kyoto, or Barcelona. Oh, Kyoto in spring would have cherry blossoms, "
    "that's a big plus. " + BUDGET_QUESTION
)

# One theme covering the whole chain: the grouped form with newlines flattened
RAW_CHAIN_ONE_LINE = RAW_CHAIN.replace("\n\n", " ")


def same_shape(a: ReasoningNode, b: ReasoningNode) -> bool:
    """Structural equality: kind, text, and child shapes; ids are ignored."""
    if a.kind != b.kind or a.text != b.text or len(a.children) != len(b.children):
        return False
    return all(same_shape(x, y) for x, y in zip(a.children, b.children))


def same_forest(a: ReasoningTree, b: ReasoningTree) -> bool:
    if len(a.roots) != len(b.roots):
        return False
    return all(same_shape(x, y) for x, y in zip(a.roots, b.roots))


def emit_tags(tree: ReasoningTree) -> str:
    """Emit the canonical fully-nested tagged form of a tree."""

    def emit(node: ReasoningNode) -> str:
        inner = node.text + "".join("\n" + emit(c) for c in node.children)
        if node.kind is NodeKind.TOPIC:
            return f"<topic>{inner}</topic>"
        if node.kind is NodeKind.FEEDBACK:
            body = f"<user>{node.text}</user>" + "".join("\n" + emit(c) for c in node.children)
            return f"<branch>{body}</branch>"
        return f"<branch>{inner}</branch>"

    return "\n".join(emit(root) for root in tree.roots)


_WORDS = (
    "ocean travel budget quiet trail museum coffee garden harbor night "
    "summer ticket market detail plan review option city beach memory "
    "question answer reason topic idea choice meal train cost light"
).split()


def random_text(rng: random.Random, lo: int = 3, hi: int = 9) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(lo, hi)))


def random_tree(rng: random.Random, max_depth: int = 6, max_nodes: int = 200) -> ReasoningTree:
    """A well-formed random forest: topic roots, branch/feedback below."""
    budget = rng.randint(1, max_nodes)
    counter = {"n": 0}

    def make(depth: int) -> ReasoningNode:
        counter["n"] += 1
        node_id = counter["n"]
        if depth == 1:
            kind = NodeKind.TOPIC
        else:
            kind = NodeKind.FEEDBACK if rng.random() < 0.15 else NodeKind.BRANCH
        children = []
        if depth < max_depth:
            while counter["n"] < budget and rng.random() < (0.6 if depth < 3 else 0.35):
                children.append(make(depth + 1))
        status = (NodeStatus.AWAITING_FEEDBACK if kind is NodeKind.FEEDBACK
                  else NodeStatus.COMPLETE)
        return ReasoningNode(
            id=node_id,
            kind=kind,
            text=random_text(rng),
            children=tuple(children),
            status=status,
            provenance=Provenance.MODEL_EMITTED,
        )

    roots = [make(1)]
    while counter["n"] < budget and rng.random() < 0.7:
        roots.append(make(1))
    return ReasoningTree(roots=tuple(roots))


FOLLOW_UP_TEXT = (
    "Given a budget under $1500, I should favor destinations with cheap flights "
    "and lodging, so Costa Rica and domestic beaches rank above Hawaii or Kyoto."
)

FINAL_ANSWER = (
    "For a spring break under $1500, Costa Rica is a strong choice. "
    "Hawaii can work if you track flight deals early! "
    "Kyoto offers culture and cherry blossoms."
)

ANSWERED_BUDGET = "Under $1500"


def build_session_fixtures(catalog, *, link_completion: str = None,
                           max_segments: int = 8):
    """Fixtures for one full spring-break session, in engine call order.

    Uses the real rendering and edit paths so digests always match what the
    engine sends.
    """
    import json

    from reasonweave.chain import (
        AnswerFeedback, InsertChild, NodeKind, Provenance, ReasoningNode,
        apply_edit, parse_tagged, regeneration_prompt,
    )
    from reasonweave.operators.catalog import CLARIFY, FOLLOW_UP, GROUP, LINK, STRUCTURE
    from reasonweave.operators.sentences import segment_answer
    from reasonweave.providers import Fixture, make_fixture

    fixtures = [
        make_fixture("reason", QUERY, f"<think>{RAW_CHAIN}</think>Pre-edit answer, discarded."),
        make_fixture(
            GROUP,
            catalog.render(GROUP, query=QUERY, reasoning=RAW_CHAIN.replace("\n", ""),
                           max_segments=max_segments),
            RAW_CHAIN_ONE_LINE,
        ),
        make_fixture(
            STRUCTURE,
            catalog.render(STRUCTURE, reasoning=RAW_CHAIN_ONE_LINE),
            APPENDIX_TAGGED,
        ),
        make_fixture(
            CLARIFY,
            catalog.render(CLARIFY, reasoning=APPENDIX_TAGGED, context="(none)"),
            APPENDIX_CLARIFIED,
        ),
    ]

    # replicate the engine's edits to derive the regeneration prompt
    tree, _ = parse_tagged(APPENDIX_CLARIFIED)
    budget = next(n for n in tree.walk() if n.kind is NodeKind.FEEDBACK)
    root2 = tree.roots[1]
    fixtures.append(make_fixture(
        FOLLOW_UP,
        catalog.render(FOLLOW_UP, query=QUERY, path=root2.text,
                       question=budget.text, answer=ANSWERED_BUDGET),
        FOLLOW_UP_TEXT,
    ))
    tree = apply_edit(tree, AnswerFeedback(budget.id, ANSWERED_BUDGET))
    child = ReasoningNode(id=tree.max_id() + 1, kind=NodeKind.BRANCH,
                          text=FOLLOW_UP_TEXT, provenance=Provenance.REGENERATED)
    tree = apply_edit(tree, InsertChild(budget.id, 0, child))
    answer_prompt = regeneration_prompt(QUERY, tree)
    fixtures.append(make_fixture("reason", answer_prompt, FINAL_ANSWER))

    premises = [(n.id, n.text) for n in tree.walk()
                if n.kind is not NodeKind.SUMMARY and n.text]
    units = segment_answer(FINAL_ANSWER)
    if link_completion is None:
        link_completion = json.dumps([
            {"hypothesis_id": 1, "entailing_premise":
                {"premise_id": child.id, "entailment_strength": 0.9}},
            {"hypothesis_id": 2, "entailing_premise":
                {"premise_id": 8, "entailment_strength": 0.7}},
            {"hypothesis_id": 3, "entailing_premise":
                {"premise_id": 9, "entailment_strength": 0.8}},
        ])
    fixtures.append(make_fixture(
        LINK,
        catalog.render(
            LINK,
            premises=json.dumps([{"id": i, "content": t} for i, t in premises],
                                ensure_ascii=False),
            hypotheses=json.dumps([{"id": i, "content": t} for i, t in units],
                                  ensure_ascii=False),
        ),
        link_completion,
    ))
    return fixtures


TAG_TOKENS = ("<topic>", "</topic>", "<branch>", "</branch>", "<user>", "</user>")


def mutate_tagged(rng: random.Random, text: str, rounds: int = None) -> str:
    """Apply 1-3 random tag deletion/duplication/truncation mutations."""
    rounds = rounds if rounds is not None else rng.randint(1, 3)
    for _ in range(rounds):
        spans = []
        for token in TAG_TOKENS:
            start = 0
            while True:
                idx = text.find(token, start)
                if idx == -1:
                    break
                spans.append((idx, idx + len(token)))
                start = idx + 1
        op = rng.choice(("delete", "duplicate", "truncate"))
        if op in ("delete", "duplicate") and spans:
            start, end = rng.choice(spans)
            if op == "delete":
                text = text[:start] + text[end:]
            else:
                text = text[:start] + text[start:end] + text[start:]
        else:
            if len(text) > 1:
                text = text[:rng.randint(1, len(text) - 1)]
    return text


def chunked(rng: random.Random, text: str) -> list[str]:
    """Split text into random-size chunks covering the whole string."""
    chunks = []
    i = 0
    while i < len(text):
        size = rng.randint(1, 17)
        chunks.append(text[i:i + size])
        i += size
    return chunks
