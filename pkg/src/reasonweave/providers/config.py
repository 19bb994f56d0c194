"""Provider configuration: three model roles behind one config surface.

API keys come only from environment variables named here, never from
config file values.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Any, Optional


@dataclass(frozen=True)
class RoleConfig:
    endpoint: str
    model: str
    api_key_env: str
    timeout_s: float = 60.0
    max_retries: int = 0

    def api_key(self) -> Optional[str]:
        return os.environ.get(self.api_key_env)

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: "RoleConfig") -> "RoleConfig":
        return replace(
            base,
            endpoint=data.get("endpoint", base.endpoint),
            model=data.get("model", base.model),
            api_key_env=data.get("api_key_env", base.api_key_env),
            timeout_s=float(data.get("timeout_s", base.timeout_s)),
            max_retries=int(data.get("max_retries", base.max_retries)),
        )


DEFAULT_REASONING = RoleConfig(
    endpoint="https://api.together.xyz/v1",
    model="deepseek-ai/DeepSeek-R1",
    api_key_env="REASONWEAVE_REASONING_KEY",
)
DEFAULT_OPERATOR = RoleConfig(
    endpoint="https://api.openai.com/v1",
    model="gpt-4o-2024-08-06",
    api_key_env="REASONWEAVE_OPERATOR_KEY",
)
DEFAULT_EMBEDDING = RoleConfig(
    endpoint="https://api.together.xyz/v1",
    model="sentence-transformers/all-MiniLM-L6-v2",
    api_key_env="REASONWEAVE_EMBED_KEY",
)


@dataclass(frozen=True)
class ProviderConfig:
    reasoning: RoleConfig = DEFAULT_REASONING
    operator: RoleConfig = DEFAULT_OPERATOR
    embedding: RoleConfig = DEFAULT_EMBEDDING

    def validate(self) -> None:
        for name in ("reasoning", "operator", "embedding"):
            role: RoleConfig = getattr(self, name)
            if role.timeout_s <= 0:
                raise ValueError(f"providers.{name}.timeout_s must be positive")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProviderConfig":
        return cls(
            reasoning=RoleConfig.from_dict(data.get("reasoning", {}), DEFAULT_REASONING),
            operator=RoleConfig.from_dict(data.get("operator", {}), DEFAULT_OPERATOR),
            embedding=RoleConfig.from_dict(data.get("embedding", {}), DEFAULT_EMBEDDING),
        )


@dataclass
class ProviderSet:
    """The three model roles the pipeline talks to."""

    reasoning: Any
    operator: Any
    embedder: Any


def scripted_provider_set(fixtures, chunk_size: int = 16) -> ProviderSet:
    """Build a fully deterministic provider set from a fixture list."""
    from .scripted import (
        FixtureQueue, HashingEmbedder, ScriptedOperatorProvider, ScriptedReasoningProvider,
    )
    queue = fixtures if isinstance(fixtures, FixtureQueue) else FixtureQueue(fixtures)
    return ProviderSet(
        reasoning=ScriptedReasoningProvider(queue, chunk_size=chunk_size),
        operator=ScriptedOperatorProvider(queue),
        embedder=HashingEmbedder(),
    )


def http_provider_set(config: ProviderConfig) -> ProviderSet:
    from .http import HttpEmbeddingProvider, HttpOperatorProvider, HttpReasoningProvider
    config.validate()
    return ProviderSet(
        reasoning=HttpReasoningProvider(config.reasoning),
        operator=HttpOperatorProvider(config.operator),
        embedder=HttpEmbeddingProvider(config.embedding),
    )
