"""Reasoning-stream events and the think/answer channel splitter."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class ReasonChannel(str, Enum):
    THINK = "think"
    ANSWER = "answer"


@dataclass(frozen=True)
class ReasonStreamEvent:
    channel: ReasonChannel
    delta: str


@dataclass(frozen=True)
class StreamDone:
    """Terminal stream marker; token counts included when the API reports them."""
    tokens: Optional[dict] = None


THINK_OPEN = "<think>"
THINK_CLOSE = "</think>"
_HOLD = max(len(THINK_OPEN), len(THINK_CLOSE)) - 1


class ThinkSplitter:
    """Split a token stream into think/answer channels by scanning for the
    think delimiters across chunk boundaries.

    At most ``len(delimiter) - 1`` characters are held back per chunk, so
    deltas reach the consumer almost immediately. Equivalent to whole-string
    delimiter scanning for every chunking of the same text.
    """

    def __init__(self):
        self._buf = ""
        self._in_think = False
        self._saw_think = False
        self._answer_started = False
        self._held_ws = ""  # whitespace before a possible leading <think>

    def feed(self, chunk: str) -> list[ReasonStreamEvent]:
        self._buf += chunk
        return self._drain(final=False)

    def flush(self) -> list[ReasonStreamEvent]:
        events = self._drain(final=True)
        if self._held_ws:
            events.append(ReasonStreamEvent(ReasonChannel.ANSWER, self._held_ws))
            self._held_ws = ""
        return events

    def _drain(self, final: bool) -> list[ReasonStreamEvent]:
        events: list[ReasonStreamEvent] = []
        while True:
            delim = THINK_CLOSE if self._in_think else THINK_OPEN
            pos = self._buf.find(delim)
            if pos != -1:
                self._emit(events, self._buf[:pos])
                self._buf = self._buf[pos + len(delim):]
                if self._in_think:
                    self._in_think = False
                else:
                    self._in_think = True
                    self._saw_think = True
                    self._held_ws = ""  # drop whitespace that preceded the think block
                continue
            if final:
                self._emit(events, self._buf)
                self._buf = ""
            else:
                keep = self._safe_emit_length()
                if keep > 0:
                    self._emit(events, self._buf[:keep])
                    self._buf = self._buf[keep:]
            return events

    def _safe_emit_length(self) -> int:
        """How much of the buffer cannot be part of a split delimiter."""
        delim = THINK_CLOSE if self._in_think else THINK_OPEN
        n = len(self._buf)
        for hold in range(min(_HOLD, n), 0, -1):
            if delim.startswith(self._buf[n - hold:]):
                return n - hold
        return n

    def _emit(self, events: list[ReasonStreamEvent], text: str) -> None:
        if not text:
            return
        if self._in_think:
            events.append(ReasonStreamEvent(ReasonChannel.THINK, text))
            return
        if not self._saw_think and not self._answer_started:
            # hold whitespace at the very start of the stream so it can be
            # dropped if a think block opens; later whitespace flows through
            combined = self._held_ws + text
            if not combined.strip():
                self._held_ws = combined
                return
            self._held_ws = ""
            text = combined
        self._answer_started = True
        events.append(ReasonStreamEvent(ReasonChannel.ANSWER, text))
