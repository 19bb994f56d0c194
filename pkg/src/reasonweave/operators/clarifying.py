"""Clarify operator and duplicate-question suppression.

Clarify adds user tags to already-structured text. Preservation beats
flagging: if the completion changes anything besides tags, it is discarded
and the input passes through unflagged. Duplicate questions are detected
by cosine similarity of sentence embeddings against the session registry;
embedding failures fail open, since hiding a question on an infrastructure
error would hide model uncertainty from the user.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from ..providers.errors import EmbeddingFailure, ProviderError
from ..providers.scripted import cosine
from .catalog import CLARIFY, PromptCatalog, complete_with_retry
from ..chain.parser import strip_tags

logger = logging.getLogger(__name__)

DEFAULT_DEDUP_THRESHOLD = 0.8
DEFAULT_EMBEDDING_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


@dataclass(frozen=True)
class ClarifyConfig:
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD
    embedding_model_id: str = DEFAULT_EMBEDDING_MODEL

    def __post_init__(self):
        if not 0 < self.dedup_threshold <= 1:
            raise ValueError("dedup_threshold must be in (0, 1]")


@dataclass
class FlaggedQuestionRegistry:
    """Append-only registry of surfaced questions and their embeddings."""

    entries: list[tuple[str, list[float]]] = field(default_factory=list)

    def add(self, question: str, vector: list[float]) -> None:
        self.entries.append((question, vector))

    def questions(self) -> list[str]:
        return [q for q, _ in self.entries]

    def to_dict(self) -> list[dict]:
        return [{"question": q, "vector": v} for q, v in self.entries]

    @classmethod
    def from_dict(cls, data: list[dict]) -> "FlaggedQuestionRegistry":
        return cls(entries=[(d["question"], list(d["vector"])) for d in data])


def clarify(tagged_text: str, provider, catalog: PromptCatalog, *,
            context: str = "", backoff_base: float = 1.0) -> str:
    """Add user tags to structured text; pass through unchanged on any doubt."""
    if not tagged_text.strip():
        raise ValueError("tagged_text must be non-empty")
    prompt = catalog.render(CLARIFY, reasoning=tagged_text, context=context or "(none)")
    try:
        completion = complete_with_retry(provider, CLARIFY, prompt, backoff_base)
    except ProviderError:
        return tagged_text
    if not completion.strip():
        return tagged_text
    if strip_tags(completion) != strip_tags(tagged_text):
        return tagged_text
    return completion


def check_question(question: str, registry: FlaggedQuestionRegistry, embedder,
                   config: ClarifyConfig) -> tuple[bool, Optional[list[float]]]:
    """(is_duplicate, embedding). The embedding is None when the embedder failed."""
    if not question.strip():
        raise ValueError("question must be non-empty")
    try:
        vector = embedder.embed([question])[0]
    except EmbeddingFailure as exc:
        logger.warning("embedding failed for flagged question, treating as new: %s", exc)
        return False, None
    for _, existing in registry.entries:
        if cosine(vector, existing) > config.dedup_threshold:
            return True, vector
    return False, vector


def is_duplicate_question(question: str, registry: FlaggedQuestionRegistry, embedder,
                          config: ClarifyConfig) -> bool:
    """True iff the question's similarity to any registered one exceeds the threshold.

    On False, the caller is expected to append the question to the registry.
    """
    duplicate, _ = check_question(question, registry, embedder, config)
    return duplicate
