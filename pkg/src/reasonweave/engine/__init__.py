from .engine import EngineConfig, SessionEngine
from .errors import EngineError, FeedbackPending, InvalidPhase, NotAwaitingFeedback
from .events import EventKind, PAUSE_MARKERS, SessionEvent
from .session import EDITABLE_PHASES, Phase, Session, new_session_id
from .store import SessionStore

__all__ = [
    "EngineConfig", "SessionEngine",
    "EngineError", "FeedbackPending", "InvalidPhase", "NotAwaitingFeedback",
    "EventKind", "PAUSE_MARKERS", "SessionEvent",
    "EDITABLE_PHASES", "Phase", "Session", "new_session_id",
    "SessionStore",
]
