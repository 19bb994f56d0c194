from .config import (
    DEFAULT_EMBEDDING,
    DEFAULT_OPERATOR,
    DEFAULT_REASONING,
    ProviderConfig,
    ProviderSet,
    RoleConfig,
    http_provider_set,
    scripted_provider_set,
)
from .errors import (
    AuthFailure,
    EmbeddingFailure,
    FixtureMismatch,
    MissingPlaceholder,
    ProviderError,
    ProviderFailure,
    ProviderTimeout,
    TransportFailure,
)
from .scripted import (
    Fixture,
    FixtureQueue,
    HashingEmbedder,
    ScriptedOperatorProvider,
    ScriptedReasoningProvider,
    cosine,
    dump_fixtures,
    load_fixtures,
    make_fixture,
    prompt_digest,
    REASON_TEMPLATE_ID,
)
from .streams import ReasonChannel, ReasonStreamEvent, StreamDone, ThinkSplitter

__all__ = [
    "DEFAULT_EMBEDDING", "DEFAULT_OPERATOR", "DEFAULT_REASONING",
    "ProviderConfig", "ProviderSet", "RoleConfig",
    "http_provider_set", "scripted_provider_set",
    "AuthFailure", "EmbeddingFailure", "FixtureMismatch", "MissingPlaceholder",
    "ProviderError", "ProviderFailure", "ProviderTimeout", "TransportFailure",
    "Fixture", "FixtureQueue", "HashingEmbedder", "ScriptedOperatorProvider",
    "ScriptedReasoningProvider", "cosine", "dump_fixtures", "load_fixtures",
    "make_fixture", "prompt_digest", "REASON_TEMPLATE_ID",
    "ReasonChannel", "ReasonStreamEvent", "StreamDone", "ThinkSplitter",
]
