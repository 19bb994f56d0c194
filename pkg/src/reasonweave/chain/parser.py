"""Streaming parser for topic/branch/user tagged reasoning text.

The parser is total: malformed input is recovered, never rejected, and no
input text is ever dropped. Recoveries are reported as diagnostics. Only
the three tag names are recognized, case-sensitive, with no attributes;
anything else (including partial tags cut off by a chunk boundary) is
plain text.

Recovery policy:
  * untagged text at the top level becomes a topic node
  * a branch at the top level attaches to the most recent topic root; with
    no preceding topic it is promoted to a topic root
  * a user tag wrapping the whole content of a branch turns that branch
    into a feedback node; elsewhere it becomes a feedback child
  * a user tag at topic level is demoted to a feedback child of the topic
  * a topic tag below the top level closes everything open and starts a
    new root
  * unclosed tags are closed at end of input; unmatched closes are dropped
  * nesting deeper than MAX_DEPTH is flattened into the depth-capped node
  * untagged text after a node's children becomes a new child so that the
    preorder text order always matches the input order
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .nodes import NodeKind, NodeStatus, Provenance, ReasoningNode, ReasoningTree, normalize_ws

MAX_DEPTH = 12

OPEN_TAGS = {"<topic>": "topic", "<branch>": "branch", "<user>": "user"}
CLOSE_TAGS = {"</topic>": "topic", "</branch>": "branch", "</user>": "user"}
ALL_TAGS = tuple(OPEN_TAGS) + tuple(CLOSE_TAGS)


class DiagnosticSeverity(str, Enum):
    RECOVERED = "recovered"
    DROPPED = "dropped"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: DiagnosticSeverity
    span: tuple[int, int]
    message: str

    def to_dict(self) -> dict:
        return {"severity": self.severity.value, "span": list(self.span), "message": self.message}


@dataclass(frozen=True)
class NodeOpened:
    node_id: int
    kind: NodeKind
    parent_id: Optional[int]


@dataclass(frozen=True)
class NodeText:
    node_id: int
    delta: str


@dataclass(frozen=True)
class NodeClosed:
    node_id: int


NodeEvent = Union[NodeOpened, NodeText, NodeClosed]


class _Frame:
    """A node under construction."""

    __slots__ = (
        "element",
        "kind",
        "depth",
        "parent_id",
        "node_id",
        "parts",
        "children",
        "in_user",
        "last_serial",
        "span_start",
        "was_closed",
    )

    def __init__(self, element: Optional[str], kind: NodeKind, depth: int,
                 parent_id: Optional[int], span_start: int):
        self.element = element  # "topic" | "branch" | "user" | None for synthetic
        self.kind = kind
        self.depth = depth
        self.parent_id = parent_id
        self.node_id: Optional[int] = None
        self.parts: list[str] = []
        self.children: list[_Frame] = []
        self.in_user = False
        self.last_serial = -1
        self.span_start = span_start
        self.was_closed = False  # a reopened topic is not "unclosed" at finalize


class _Phantom:
    """An open tag flattened away (depth cap or nested user); closes must still match it."""

    __slots__ = ("element",)

    def __init__(self, element: str):
        self.element = element


class StreamParser:
    """Incremental parser; feed chunks, then finalize into a tree.

    Single-owner state: one parser per stream. Node ids are assigned in
    emission order starting at ``start_id``, so incremental and batch
    parses of the same input produce identical trees.
    """

    def __init__(self, start_id: int = 1):
        self._buf = ""
        self._offset = 0  # absolute position of _buf[0] in the full input
        self.next_id = start_id
        self._serial = 0  # bumped per tag token; separates text runs
        self._stack: list[Union[_Frame, _Phantom]] = []
        self._roots: list[_Frame] = []
        self._reopen: Optional[_Frame] = None  # closed topic root still able to adopt branches
        self._events: list[NodeEvent] = []
        self._diags: list[ParseDiagnostic] = []
        self._finalized = False

    # -- public API ---------------------------------------------------------

    def feed(self, chunk: str) -> list[NodeEvent]:
        if self._finalized:
            raise RuntimeError("parser already finalized")
        self._events = []
        self._buf += chunk
        self._scan(final=False)
        return self._events

    def finalize(self) -> tuple[list[NodeEvent], ReasoningTree, list[ParseDiagnostic]]:
        if self._finalized:
            raise RuntimeError("parser already finalized")
        self._finalized = True
        self._events = []
        self._scan(final=True)
        end = self._offset
        while self._stack:
            top = self._stack[-1]
            if isinstance(top, _Phantom):
                self._stack.pop()
                continue
            if top.element is not None and not top.was_closed:
                self._diag(end, end, f"unclosed <{top.element}> closed at end of input")
            self._close_frame(top)
        self._retire_reopen()
        roots = [self._build(f) for f in self._roots if not self._dropped(f)]
        tree = ReasoningTree(roots=tuple(roots))
        return self._events, tree, list(self._diags)

    # -- lexer ---------------------------------------------------------------

    def _scan(self, final: bool) -> None:
        buf = self._buf
        i = 0
        n = len(buf)
        while i < n:
            lt = buf.find("<", i)
            if lt == -1:
                self._on_text(buf[i:], self._offset + i)
                i = n
                break
            if lt > i:
                self._on_text(buf[i:lt], self._offset + i)
                i = lt
            rest = buf[lt:]
            matched = None
            for tag in ALL_TAGS:
                if rest.startswith(tag):
                    matched = tag
                    break
            if matched:
                if matched in OPEN_TAGS:
                    self._on_open(OPEN_TAGS[matched], self._offset + lt, len(matched))
                else:
                    self._on_close(CLOSE_TAGS[matched], self._offset + lt, len(matched))
                i = lt + len(matched)
                continue
            if not final and any(tag.startswith(rest) for tag in ALL_TAGS):
                break  # possible tag split across chunks; wait for more input
            # literal '<' that starts no tag: treat as text up to the next '<'
            nxt = buf.find("<", lt + 1)
            end = n if nxt == -1 else nxt
            self._on_text(buf[lt:end], self._offset + lt)
            i = end
        self._buf = buf[i:]
        self._offset += i

    # -- builder -------------------------------------------------------------

    def _diag(self, start: int, end: int, message: str,
              severity: DiagnosticSeverity = DiagnosticSeverity.RECOVERED) -> None:
        self._diags.append(ParseDiagnostic(severity, (start, end), message))

    def _emit(self, event: NodeEvent) -> None:
        self._events.append(event)

    def _nearest_frame(self) -> Optional[_Frame]:
        for entry in reversed(self._stack):
            if isinstance(entry, _Frame):
                return entry
        return None

    def _flush_open(self, frame: _Frame) -> None:
        if frame.node_id is not None:
            return
        frame.node_id = self.next_id
        self.next_id += 1
        self._emit(NodeOpened(frame.node_id, frame.kind, frame.parent_id))

    def _append_text(self, frame: _Frame, piece: str) -> None:
        if not frame.parts and not piece.strip():
            return  # leading whitespace carries nothing
        self._flush_open(frame)
        if frame.parts and frame.last_serial != self._serial:
            piece = " " + piece  # a tag token separated the runs
        frame.parts.append(piece)
        frame.last_serial = self._serial
        self._emit(NodeText(frame.node_id, piece))

    def _push(self, element: Optional[str], kind: NodeKind, parent: Optional[_Frame],
              start: int) -> _Frame:
        if parent is not None:
            self._flush_open(parent)
            frame = _Frame(element, kind, parent.depth + 1, parent.node_id, start)
        else:
            frame = _Frame(element, kind, 1, None, start)
            self._roots.append(frame)
        self._stack.append(frame)
        return frame

    def _close_synthetic_tops(self) -> None:
        while self._stack and isinstance(self._stack[-1], _Frame) \
                and self._stack[-1].element is None:
            self._close_frame(self._stack[-1])

    def _retire_reopen(self) -> None:
        if self._reopen is not None:
            self._emit(NodeClosed(self._reopen.node_id))
            self._reopen = None

    def _dropped(self, frame: _Frame) -> bool:
        return frame.node_id is None

    def _close_frame(self, frame: _Frame) -> None:
        popped = self._stack.pop()
        assert popped is frame
        if frame.node_id is None and not frame.parts and not frame.children:
            # empty element: drop it entirely (no text was lost)
            if frame.depth == 1:
                self._roots.remove(frame)
            self._diag(frame.span_start, frame.span_start, "empty element dropped")
            return
        if (frame.element == "branch" and frame.children and not frame.was_closed
                and not "".join(frame.parts).strip()):
            self._diag(frame.span_start, frame.span_start,
                       "branch has no sentence before its nested branches")
        self._flush_open(frame)
        frame.was_closed = True
        if frame.depth == 1 and frame.kind is NodeKind.TOPIC:
            # defer the close: a following top-level branch may still attach here
            self._reopen = frame
        else:
            self._emit(NodeClosed(frame.node_id))
        if frame.depth > 1:
            parent = self._nearest_frame()
            if parent is not None:
                parent.children.append(frame)

    def _build(self, frame: _Frame) -> ReasoningNode:
        text = normalize_ws("".join(frame.parts))
        children = tuple(self._build(c) for c in frame.children if not self._dropped(c))
        if frame.kind is NodeKind.FEEDBACK:
            status = NodeStatus.AWAITING_FEEDBACK
        else:
            status = NodeStatus.COMPLETE
        return ReasoningNode(
            id=frame.node_id,
            kind=frame.kind,
            text=text,
            children=children,
            status=status,
            provenance=Provenance.MODEL_EMITTED,
        )

    # -- token handlers ------------------------------------------------------

    def _on_text(self, piece: str, start: int) -> None:
        if not piece:
            return
        top = self._stack[-1] if self._stack else None
        if top is None:
            if not piece.strip():
                return
            self._retire_reopen()
            frame = self._push(None, NodeKind.TOPIC, None, start)
            self._diag(start, start + len(piece), "untagged text at top level became a topic")
            self._append_text(frame, piece)
            return
        frame = top if isinstance(top, _Frame) else self._nearest_frame()
        if not frame.children:
            self._append_text(frame, piece)
            return
        if not piece.strip():
            return  # whitespace between sibling elements
        # text after children starts a new child so preorder keeps input order
        child = self._push(None, NodeKind.BRANCH, frame, start)
        self._diag(start, start + len(piece),
                   "untagged text after nested elements became a branch")
        self._append_text(child, piece)

    def _on_open(self, name: str, start: int, length: int) -> None:
        self._serial += 1
        self._close_synthetic_tops()
        end = start + length
        if name == "topic":
            if self._stack:
                self._diag(start, end, "nested <topic> moved to top level")
                while self._stack:
                    top = self._stack[-1]
                    if isinstance(top, _Phantom):
                        self._stack.pop()
                    else:
                        self._close_frame(top)
            self._retire_reopen()
            self._push("topic", NodeKind.TOPIC, None, start)
            return

        top = self._stack[-1] if self._stack else None
        if isinstance(top, _Phantom):
            self._stack.append(_Phantom(name))
            self._diag(start, end, f"<{name}> beyond depth cap flattened")
            return

        if name == "branch":
            if top is None:
                if self._reopen is not None:
                    parent = self._reopen
                    self._reopen = None
                    self._stack.append(parent)
                    self._push("branch", NodeKind.BRANCH, parent, start)
                else:
                    self._push("branch", NodeKind.TOPIC, None, start)
                    self._diag(start, end, "top-level <branch> without a topic promoted to topic")
                return
            if top.depth >= MAX_DEPTH:
                self._stack.append(_Phantom(name))
                self._diag(start, end, f"<{name}> beyond depth cap flattened")
                return
            self._push("branch", NodeKind.BRANCH, top, start)
            return

        # name == "user"
        if top is None:
            if self._reopen is not None:
                parent = self._reopen
                self._reopen = None
                self._stack.append(parent)
                self._push("user", NodeKind.FEEDBACK, parent, start)
                self._diag(start, end, "user tag at topic level demoted to a feedback child")
            else:
                self._push("user", NodeKind.TOPIC, None, start)
                self._diag(start, end, "user tag without enclosing structure kept as topic text")
            return
        if top.in_user or top.element == "user":
            self._stack.append(_Phantom(name))
            self._diag(start, end, "nested user tag flattened")
            return
        if top.element == "branch" and top.kind is NodeKind.BRANCH \
                and top.node_id is None and not top.parts and not top.children:
            # user tag wrapping the whole branch content: the branch becomes feedback
            top.kind = NodeKind.FEEDBACK
            top.in_user = True
            return
        if top.depth >= MAX_DEPTH:
            self._stack.append(_Phantom(name))
            self._diag(start, end, f"<{name}> beyond depth cap flattened")
            return
        if top.element == "topic":
            self._push("user", NodeKind.FEEDBACK, top, start)
            self._diag(start, end, "user tag inside topic demoted to a feedback child")
            return
        self._push("user", NodeKind.FEEDBACK, top, start)

    def _on_close(self, name: str, start: int, length: int) -> None:
        self._serial += 1
        self._close_synthetic_tops()
        end = start + length
        match_index = None
        for i in range(len(self._stack) - 1, -1, -1):
            entry = self._stack[i]
            if isinstance(entry, _Phantom):
                if entry.element == name:
                    match_index = i
                    break
            else:
                if entry.element == name or (entry.in_user and name == "user"):
                    match_index = i
                    break
        if match_index is None:
            self._diag(start, end, f"unmatched </{name}> dropped")
            return
        while len(self._stack) - 1 > match_index:
            top = self._stack[-1]
            if isinstance(top, _Phantom):
                self._stack.pop()
            else:
                if top.element is not None:
                    self._diag(start, end, f"<{top.element}> implicitly closed by </{name}>")
                self._close_frame(top)
        target = self._stack[match_index]
        if isinstance(target, _Phantom):
            self._stack.pop()
        elif target.in_user and name == "user" and target.element != "user":
            target.in_user = False
        else:
            self._close_frame(target)


def parse_tagged(text: str, start_id: int = 1) -> tuple[ReasoningTree, list[ParseDiagnostic]]:
    """Parse a complete tagged string. Total: never raises on malformed input."""
    parser = StreamParser(start_id=start_id)
    parser.feed(text)
    _, tree, diags = parser.finalize()
    return tree, diags


def strip_tags(text: str) -> str:
    """Input with every complete tag token replaced by a space, normalized.

    The preorder text of a parse of ``text`` always equals this value: the
    text-preservation oracle used throughout the tests.
    """
    for tag in ALL_TAGS:
        text = text.replace(tag, " ")
    return normalize_ws(text)
