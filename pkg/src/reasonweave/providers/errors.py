"""Provider error taxonomy. ``retryable`` drives the one-retry policy."""
from __future__ import annotations


class ProviderError(Exception):
    retryable = False


class ProviderFailure(ProviderError):
    """Generic model/transport failure from a provider call."""
    retryable = True


class ProviderTimeout(ProviderError):
    retryable = True


class TransportFailure(ProviderError):
    retryable = True


class AuthFailure(ProviderError):
    retryable = False


class EmbeddingFailure(Exception):
    """Embedding calls fail open: callers must treat this as non-fatal."""


class MissingPlaceholder(Exception):
    """A template placeholder had no binding; raised before any network call."""


class FixtureMismatch(Exception):
    """A scripted provider was asked for something its fixtures do not cover."""

    def __init__(self, message: str, template_id: str = ""):
        super().__init__(message)
        self.template_id = template_id
