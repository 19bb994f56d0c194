"""Engine errors. Each names the violated precondition; none are silent."""
from __future__ import annotations


class EngineError(Exception):
    code = "engine_error"


class InvalidPhase(EngineError):
    code = "invalid_phase"

    def __init__(self, operation: str, phase: str, allowed: tuple[str, ...]):
        super().__init__(
            f"{operation} requires phase in {allowed}, session is in '{phase}'")
        self.phase = phase
        self.allowed = allowed


class NotAwaitingFeedback(EngineError):
    code = "not_awaiting_feedback"

    def __init__(self, node_id: int, status: str):
        super().__init__(f"node {node_id} is not awaiting feedback (status: {status})")
        self.node_id = node_id


class FeedbackPending(EngineError):
    code = "feedback_pending"

    def __init__(self, node_ids: list[int]):
        super().__init__(
            "answer generation requires all surfaced feedback resolved; "
            f"awaiting nodes: {node_ids}")
        self.node_ids = node_ids
