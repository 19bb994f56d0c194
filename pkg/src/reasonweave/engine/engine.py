"""Session engine: the orchestration state machine.

A session flows ask -> reasoning -> grouping -> per-segment structure +
clarify -> interactive tree -> edited-think serialization -> answer
regeneration -> linking. Generation runs as a generator pumped one event
at a time, so pauses take effect at node boundaries and feedback halts
park the pipeline until the user responds.

All mutations for one session are serialized through its lock; event
consumers read the ordered log concurrently. With scripted providers two
runs of the same session script produce identical event logs.
"""
from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field, replace as dc_replace
from typing import Iterator, Optional

from ..chain.edits import (
    AnswerFeedback, Collapse, Delete, Expand, InsertChild, SetText, SkipFeedback,
    InvalidTargetError, UnknownIdError, apply_edit, replace_node,
)
from ..chain.nodes import NodeKind, NodeStatus, Provenance, ReasoningNode, ReasoningTree, normalize_ws
from ..chain.parser import NodeClosed, NodeOpened, NodeText, StreamParser
from ..chain.serialize import regeneration_prompt, serialize_think
from ..operators.catalog import BRANCH, FOLLOW_UP, REGENERATE, PromptCatalog, complete_with_retry
from ..operators.clarifying import ClarifyConfig, check_question, clarify
from ..operators.grouping import (
    DEFAULT_MAX_SEGMENTS, DEFAULT_PRESERVATION_FLOOR, group_thoughts,
)
from ..operators.linking import LinkMap, link
from ..operators.sentences import segment_answer
from ..operators.structuring import structure_tagged
from ..operators.summarizing import SummaryConfig, summarize_subtree
from ..providers.config import ProviderSet
from ..providers.errors import ProviderError
from ..providers.streams import ReasonChannel, ReasonStreamEvent
from .errors import FeedbackPending, InvalidPhase, NotAwaitingFeedback
from .events import EventKind
from .session import EDITABLE_PHASES, Phase, Session, new_session_id
from .store import SessionStore

logger = logging.getLogger(__name__)

IDLE_EVICTION_S = 24 * 3600


@dataclass(frozen=True)
class EngineConfig:
    clarify: ClarifyConfig = field(default_factory=ClarifyConfig)
    summary: SummaryConfig = field(default_factory=SummaryConfig)
    max_segments: int = DEFAULT_MAX_SEGMENTS
    preservation_floor: float = DEFAULT_PRESERVATION_FLOOR
    backoff_base: float = 1.0
    include_summaries_in_answer: bool = False
    link_display_threshold: float = 0.5
    interactive: bool = True  # False: feedback nodes stay awaiting, no halts
    run_mode: str = "sync"  # sync | thread | manual


class SessionEngine:
    def __init__(self, providers: ProviderSet, catalog: Optional[PromptCatalog] = None,
                 store: Optional[SessionStore] = None,
                 config: EngineConfig = EngineConfig()):
        self.providers = providers
        self.catalog = catalog or PromptCatalog.default()
        self.store = store
        self.config = config
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()

    # -- session registry -----------------------------------------------------

    def create_session(self, prompt: str) -> Session:
        if not prompt or not prompt.strip():
            raise ValueError("prompt must be non-empty")
        self.evict_idle()
        session = Session(id=new_session_id(), user_prompt=prompt.strip())
        with self._registry_lock:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.RLock()
        return session

    def get_session(self, session_id: str) -> Optional[Session]:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None and self.store is not None:
            session = self.store.load(session_id)
            if session is not None:
                with self._registry_lock:
                    self._sessions[session.id] = session
                    self._locks.setdefault(session.id, threading.RLock())
        if session is not None:
            session.touch()
        return session

    def lock_for(self, session: Session) -> threading.RLock:
        with self._registry_lock:
            return self._locks.setdefault(session.id, threading.RLock())

    def evict_idle(self, max_idle_s: float = IDLE_EVICTION_S) -> None:
        """Drop long-idle sessions from memory; their documents stay on disk."""
        cutoff = time.time() - max_idle_s
        with self._registry_lock:
            stale = [sid for sid, s in self._sessions.items()
                     if s.last_access < cutoff and s.generator is None]
            for sid in stale:
                self._sessions.pop(sid, None)
                self._locks.pop(sid, None)

    def session_document(self, session: Session) -> dict:
        doc = session.to_dict()
        doc["link_display_threshold"] = self.config.link_display_threshold
        return doc

    # -- lifecycle -------------------------------------------------------------

    def start(self, session: Session, raw_think: Optional[str] = None) -> Session:
        """Begin generation. With ``raw_think`` the reasoning call is skipped
        and the given chain is structured directly (offline/batch use)."""
        with self.lock_for(session):
            if session.phase is not Phase.ASKING:
                raise InvalidPhase("start", session.phase.value, (Phase.ASKING.value,))
            session.generator = self._run_pipeline(session, raw_think)
        self._kick(session)
        return session

    def generate_answer(self, session: Session) -> Session:
        with self.lock_for(session):
            if session.phase not in (Phase.TREE_READY, Phase.ANSWERED):
                raise InvalidPhase("generate_answer", session.phase.value,
                                   (Phase.TREE_READY.value, Phase.ANSWERED.value))
            awaiting = session.awaiting_feedback_ids()
            if awaiting:
                raise FeedbackPending(awaiting)
            prompt = regeneration_prompt(
                session.user_prompt, session.tree,
                include_summaries=self.config.include_summaries_in_answer)
            session.generator = self._run_answer(session, prompt)
        self._kick(session)
        return session

    def assembled_answer_prompt(self, session: Session) -> str:
        """The exact regeneration prompt generate_answer would send."""
        return regeneration_prompt(
            session.user_prompt, session.tree,
            include_summaries=self.config.include_summaries_in_answer)

    # -- pumping ---------------------------------------------------------------

    def step(self, session: Session, count: int = 1) -> int:
        """Advance generation by up to ``count`` events; returns steps taken."""
        taken = 0
        lock = self.lock_for(session)
        for _ in range(count):
            with lock:
                if (session.generator is None or session.paused
                        or session.pending_feedback is not None):
                    break
                try:
                    next(session.generator)
                    taken += 1
                except StopIteration:
                    session.generator = None
                    break
        return taken

    def pump(self, session: Session) -> None:
        """Run generation until it halts (feedback), pauses, or finishes."""
        lock = self.lock_for(session)
        while True:
            with lock:
                if (session.generator is None or session.paused
                        or session.pending_feedback is not None):
                    return
                try:
                    next(session.generator)
                except StopIteration:
                    session.generator = None
                    return

    def _kick(self, session: Session) -> None:
        mode = self.config.run_mode
        if mode == "manual":
            return
        if mode == "thread":
            lock = self.lock_for(session)
            with lock:
                if session.pumping:
                    return
                session.pumping = True

            def run():
                try:
                    self.pump(session)
                finally:
                    with lock:
                        session.pumping = False

            threading.Thread(target=run, daemon=True).start()
            return
        self.pump(session)

    def _persist(self, session: Session) -> None:
        if self.store is not None:
            self.store.save(session)

    # -- the generation pipeline ------------------------------------------------

    def _run_pipeline(self, session: Session, raw_think: Optional[str]) -> Iterator[None]:
        cfg = self.config
        session.phase = Phase.REASONING
        self._persist(session)
        yield
        if raw_think is not None:
            session.raw_think = raw_think
        else:
            try:
                for event in self.providers.reasoning.stream(session.user_prompt):
                    if isinstance(event, ReasonStreamEvent):
                        if event.channel is ReasonChannel.THINK:
                            session.raw_think += event.delta
                        # the pre-edit answer is discarded: the answer is
                        # regenerated later from the edited tree
                        yield
            except ProviderError as exc:
                session.append_event(EventKind.ERROR,
                                     {"code": "provider_failure", "message": str(exc)})
                self._persist(session)
                return
        if not session.raw_think.strip():
            session.append_event(EventKind.ERROR, {
                "code": "empty_think",
                "message": "reasoning model produced no thinking text"})
            self._persist(session)
            return

        session.phase = Phase.STRUCTURING
        self._persist(session)
        yield
        session.segments = group_thoughts(
            session.raw_think, session.user_prompt, self.providers.operator, self.catalog,
            max_segments=cfg.max_segments, preservation_floor=cfg.preservation_floor,
            backoff_base=cfg.backoff_base)
        yield

        context = ""
        for segment in session.segments.segments:
            tagged = structure_tagged(segment, self.providers.operator, self.catalog,
                                      backoff_base=cfg.backoff_base)
            if tagged.degraded:
                session.diagnostics.append({
                    "severity": "recovered", "span": [0, len(segment)],
                    "message": "structure output discarded; segment kept as a single topic"})
            clarified = clarify(tagged.tagged_text, self.providers.operator, self.catalog,
                                context=context, backoff_base=cfg.backoff_base)
            context = clarified if not context else f"{context}\n\n{clarified}"
            yield from self._emit_fragment(session, clarified)

        session.append_event(EventKind.TREE_COMPLETE,
                             {"node_count": session.tree.node_count()})
        session.phase = Phase.TREE_READY
        self._persist(session)
        yield

    def _emit_fragment(self, session: Session, clarified: str) -> Iterator[None]:
        parser = StreamParser(start_id=session.next_node_id)
        events = parser.feed(clarified)
        tail, fragment, diagnostics = parser.finalize()
        events += tail
        session.next_node_id = parser.next_id
        session.diagnostics.extend(d.to_dict() for d in diagnostics)

        nodes = {n.id: n for n in fragment.walk()}
        parents: dict[int, Optional[int]] = {}
        indexes: dict[int, int] = {}
        for i, root in enumerate(fragment.roots):
            parents[root.id] = None
            indexes[root.id] = len(session.tree.roots) + i
            for node in root.walk():
                for j, child in enumerate(node.children):
                    parents[child.id] = node.id
                    indexes[child.id] = j

        session.tree = dc_replace(
            session.tree, roots=session.tree.roots + fragment.roots)
        demoted: set[int] = set()

        for event in events:
            if isinstance(event, NodeOpened):
                node = nodes[event.node_id]
                kind = node.kind
                if kind is NodeKind.FEEDBACK:
                    duplicate, vector = check_question(
                        node.text, session.registry, self.providers.embedder,
                        self.config.clarify)
                    if duplicate:
                        demoted.add(node.id)
                        kind = NodeKind.BRANCH
                        session.tree = replace_node(
                            session.tree, node.id,
                            lambda n: dc_replace(n, kind=NodeKind.BRANCH,
                                                 status=NodeStatus.COMPLETE))
                    elif vector is not None:
                        session.registry.add(node.text, vector)
                session.append_event(EventKind.NODE_ADDED, {
                    "node_id": node.id,
                    "parent_id": parents.get(node.id),
                    "index": indexes.get(node.id, 0),
                    "kind": kind.value,
                    "text": "",
                    "status": NodeStatus.GENERATING.value,
                    "provenance": Provenance.MODEL_EMITTED.value,
                })
                yield
            elif isinstance(event, NodeText):
                session.append_event(EventKind.NODE_TEXT_DELTA, {
                    "node_id": event.node_id, "delta": event.delta})
                yield
            elif isinstance(event, NodeClosed):
                node = nodes[event.node_id]
                is_feedback = node.kind is NodeKind.FEEDBACK and node.id not in demoted
                status = NodeStatus.AWAITING_FEEDBACK if is_feedback else NodeStatus.COMPLETE
                session.append_event(EventKind.NODE_COMPLETED, {
                    "node_id": node.id, "status": status.value})
                yield
                if is_feedback:
                    session.append_event(EventKind.FEEDBACK_REQUIRED, {
                        "node_id": node.id, "question": node.text})
                    if self.config.interactive:
                        session.pending_feedback = node.id
                        self._persist(session)
                    yield

    def _run_answer(self, session: Session, prompt: str) -> Iterator[None]:
        cfg = self.config
        previous_phase = session.phase
        session.phase = Phase.ANSWERING
        session.answer = None
        session.answer_units = []
        session.links = None
        self._persist(session)
        yield
        answer = ""
        try:
            for event in self.providers.reasoning.stream(prompt):
                if isinstance(event, ReasonStreamEvent) \
                        and event.channel is ReasonChannel.ANSWER:
                    answer += event.delta
                    session.append_event(EventKind.ANSWER_DELTA, {"delta": event.delta})
                    yield
        except ProviderError as exc:
            session.phase = previous_phase  # allow a retry
            session.append_event(EventKind.ERROR,
                                 {"code": "provider_failure", "message": str(exc)})
            self._persist(session)
            return
        session.answer = answer.strip()
        session.answer_units = segment_answer(session.answer) if session.answer else []
        session.append_event(EventKind.ANSWER_COMPLETE, {
            "answer": session.answer,
            "units": [[i, t] for i, t in session.answer_units],
        })
        yield

        premises = [(n.id, n.text) for n in session.tree.walk()
                    if n.kind is not NodeKind.SUMMARY and n.text]
        if premises and session.answer_units:
            session.links = link(premises, session.answer_units,
                                 self.providers.operator, self.catalog,
                                 backoff_base=cfg.backoff_base)
        else:
            session.links = LinkMap()
        if session.links.edges:
            session.append_event(EventKind.LINKS_READY, {
                "edges": [e.to_dict() for e in session.links.edges],
                "display_threshold": cfg.link_display_threshold,
            })
        else:
            session.append_event(EventKind.LINKS_UNAVAILABLE,
                                 {"reason": "no valid link edges"})
        session.phase = Phase.ANSWERED
        self._persist(session)

    # -- feedback ---------------------------------------------------------------

    def submit_feedback(self, session: Session, node_id: int,
                        answer: Optional[str] = None) -> Session:
        with self.lock_for(session):
            node = session.tree.find(node_id)
            if node is None:
                raise UnknownIdError(node_id)
            if node.kind is not NodeKind.FEEDBACK \
                    or node.status is not NodeStatus.AWAITING_FEEDBACK:
                raise NotAwaitingFeedback(node_id, node.status.value)
            if answer and answer.strip():
                session.tree = apply_edit(session.tree, AnswerFeedback(node_id, answer))
                self._emit_node_updated(session, node_id)
                self._insert_follow_up(session, node_id, answer)
            else:
                session.tree = apply_edit(session.tree, SkipFeedback(node_id))
                self._emit_node_updated(session, node_id)
            if session.pending_feedback == node_id:
                session.pending_feedback = None
                session.append_event(EventKind.GENERATION_RESUMED, {"node_id": node_id})
            self._persist(session)
        self._kick(session)
        return session

    def _insert_follow_up(self, session: Session, node_id: int, answer: str) -> None:
        node = session.tree.find(node_id)
        path = session.tree.path_to(node_id)[:-1]
        prompt = self.catalog.render(
            FOLLOW_UP,
            query=session.user_prompt,
            path="\n\n".join(n.text for n in path if n.text),
            question=node.text,
            answer=answer,
        )
        try:
            completion = complete_with_retry(self.providers.operator, FOLLOW_UP, prompt,
                                             self.config.backoff_base)
        except ProviderError as exc:
            session.append_event(EventKind.ERROR, {
                "code": "follow_up_failed", "message": str(exc), "node_id": node_id})
            return
        child = ReasoningNode(
            id=session.next_node_id,
            kind=NodeKind.BRANCH,
            text=normalize_ws(completion),
            status=NodeStatus.COMPLETE,
            provenance=Provenance.REGENERATED,
        )
        session.next_node_id += 1
        session.tree = apply_edit(session.tree, InsertChild(node_id, 0, child))
        session.append_event(EventKind.NODE_ADDED, {
            "node_id": child.id, "parent_id": node_id, "index": 0,
            "kind": child.kind.value, "text": child.text,
            "status": child.status.value, "provenance": child.provenance.value,
        })

    # -- edits -------------------------------------------------------------------

    def _require_editable(self, session: Session, operation: str) -> None:
        if session.phase not in EDITABLE_PHASES:
            raise InvalidPhase(operation, session.phase.value,
                               tuple(p.value for p in EDITABLE_PHASES))

    def _emit_node_updated(self, session: Session, node_id: int) -> None:
        node = session.tree.find(node_id)
        session.append_event(EventKind.NODE_UPDATED, {
            "node_id": node.id,
            "kind": node.kind.value,
            "text": node.text,
            "status": node.status.value,
            "provenance": node.provenance.value,
            "feedback_answer": node.feedback_answer,
            "collapsed": node.id in session.tree.collapsed,
        })

    def set_node_text(self, session: Session, node_id: int, text: str) -> ReasoningNode:
        with self.lock_for(session):
            self._require_editable(session, "edit")
            session.tree = apply_edit(session.tree, SetText(node_id, text))
            self._emit_node_updated(session, node_id)
            self._persist(session)
            return session.tree.find(node_id)

    def delete_node(self, session: Session, node_id: int) -> None:
        with self.lock_for(session):
            self._require_editable(session, "delete")
            target = session.tree.find(node_id)
            if target is None:
                raise UnknownIdError(node_id)
            removed = {n.id for n in target.walk()}
            session.tree = apply_edit(session.tree, Delete(node_id))
            session.append_event(EventKind.NODE_REMOVED,
                                 {"node_id": node_id, "removed_count": len(removed)})
            resume = session.pending_feedback in removed
            if resume:
                session.pending_feedback = None
                session.append_event(EventKind.GENERATION_RESUMED, {"node_id": node_id})
            self._persist(session)
        if resume:
            self._kick(session)

    def branch_out(self, session: Session, node_id: int, custom_prompt: str) -> ReasoningNode:
        if not custom_prompt or not custom_prompt.strip():
            raise ValueError("custom_prompt must be non-empty")
        with self.lock_for(session):
            self._require_editable(session, "branch_out")
            node = session.tree.find(node_id)
            if node is None:
                raise UnknownIdError(node_id)
            if node.kind is NodeKind.SUMMARY:
                raise InvalidTargetError("summary nodes are leaves; branch out elsewhere")
            path = session.tree.path_to(node_id)
            prompt = self.catalog.render(
                BRANCH,
                query=session.user_prompt,
                path="\n\n".join(n.text for n in path if n.text),
                prompt=custom_prompt,
            )
            try:
                completion = complete_with_retry(self.providers.operator, BRANCH, prompt,
                                                 self.config.backoff_base)
            except ProviderError as exc:
                session.append_event(EventKind.ERROR, {
                    "code": "provider_failure", "message": str(exc), "node_id": node_id})
                self._persist(session)
                raise
            child = ReasoningNode(
                id=session.next_node_id,
                kind=NodeKind.BRANCH,
                text=normalize_ws(completion),
                status=NodeStatus.COMPLETE,
                provenance=Provenance.REGENERATED,
            )
            session.next_node_id += 1
            index = len(node.children)
            session.tree = apply_edit(session.tree, InsertChild(node_id, index, child))
            session.append_event(EventKind.NODE_ADDED, {
                "node_id": child.id, "parent_id": node_id, "index": index,
                "kind": child.kind.value, "text": child.text,
                "status": child.status.value, "provenance": child.provenance.value,
                "custom_prompt": custom_prompt,
            })
            self._persist(session)
            return child

    def regenerate_node(self, session: Session, node_id: int) -> ReasoningNode:
        with self.lock_for(session):
            self._require_editable(session, "regenerate")
            node = session.tree.find(node_id)
            if node is None:
                raise UnknownIdError(node_id)
            if node.kind not in (NodeKind.TOPIC, NodeKind.BRANCH):
                raise InvalidTargetError(
                    f"only topic and branch nodes can be regenerated, not {node.kind.value}")
            path = session.tree.path_to(node_id)[:-1]
            prompt = self.catalog.render(
                REGENERATE,
                query=session.user_prompt,
                path="\n\n".join(n.text for n in path if n.text),
                previous=node.text,
            )
            try:
                completion = complete_with_retry(self.providers.operator, REGENERATE,
                                                 prompt, self.config.backoff_base)
            except ProviderError as exc:
                session.append_event(EventKind.ERROR, {
                    "code": "provider_failure", "message": str(exc), "node_id": node_id})
                self._persist(session)
                raise
            session.tree = replace_node(
                session.tree, node_id,
                lambda n: dc_replace(n, text=normalize_ws(completion),
                                     provenance=Provenance.REGENERATED))
            self._emit_node_updated(session, node_id)
            self._persist(session)
            return session.tree.find(node_id)

    def collapse_node(self, session: Session, node_id: int) -> ReasoningNode:
        with self.lock_for(session):
            self._require_editable(session, "collapse")
            node = session.tree.find(node_id)
            if node is None:
                raise UnknownIdError(node_id)
            subtree_text = serialize_think(ReasoningTree(roots=(node,)),
                                           include_feedback_answers=True)
            summary_text = summarize_subtree(
                subtree_text, self.providers.operator, self.catalog,
                self.config.summary, backoff_base=self.config.backoff_base)
            session.tree = apply_edit(session.tree, Collapse(node_id, summary_text))
            session.next_node_id = max(session.next_node_id, session.tree.max_id() + 1)
            summary = session.tree.find(node_id).children[0]
            session.append_event(EventKind.NODE_ADDED, {
                "node_id": summary.id, "parent_id": node_id, "index": 0,
                "kind": summary.kind.value, "text": summary.text,
                "status": summary.status.value, "provenance": summary.provenance.value,
            })
            self._emit_node_updated(session, node_id)
            self._persist(session)
            return summary

    def expand_node(self, session: Session, node_id: int) -> None:
        with self.lock_for(session):
            self._require_editable(session, "expand")
            node = session.tree.find(node_id)
            if node is None:
                raise UnknownIdError(node_id)
            summary_ids = [c.id for c in node.children if c.kind is NodeKind.SUMMARY]
            session.tree = apply_edit(session.tree, Expand(node_id))
            for sid in summary_ids:
                session.append_event(EventKind.NODE_REMOVED,
                                     {"node_id": sid, "removed_count": 1})
            self._emit_node_updated(session, node_id)
            self._persist(session)

    # -- pause / resume ----------------------------------------------------------

    def pause(self, session: Session) -> Session:
        with self.lock_for(session):
            if session.phase is not Phase.STRUCTURING:
                raise InvalidPhase("pause", session.phase.value,
                                   (Phase.STRUCTURING.value,))
            if session.paused:
                return session
            session.paused = True
            session.append_event(EventKind.GENERATION_PAUSED, {})
            self._persist(session)
            return session

    def resume(self, session: Session) -> Session:
        with self.lock_for(session):
            if not session.paused:
                return session
            session.paused = False
            session.append_event(EventKind.GENERATION_RESUMED, {})
            self._persist(session)
        self._kick(session)
        return session
