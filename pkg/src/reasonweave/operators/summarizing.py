"""Subtree summarization with a hard word bound."""
from __future__ import annotations

from dataclasses import dataclass

from ..providers.errors import ProviderError
from .catalog import SUMMARIZE, PromptCatalog, complete_with_retry
from .sentences import first_sentence

ELLIPSIS = "…"


@dataclass(frozen=True)
class SummaryConfig:
    max_words: int = 60

    def __post_init__(self):
        if self.max_words < 1:
            raise ValueError("max_words must be at least 1")


def word_count(text: str) -> int:
    return len(text.split())


def truncate_words(text: str, max_words: int) -> str:
    words = text.split()
    if len(words) <= max_words:
        return text.strip()
    return " ".join(words[:max_words]) + ELLIPSIS


def summarize_subtree(subtree_text: str, provider, catalog: PromptCatalog,
                      config: SummaryConfig = SummaryConfig(), *,
                      backoff_base: float = 1.0) -> str:
    """Summarize preorder subtree text to at most ``config.max_words`` words.

    An over-length completion is retried once with the limit restated, then
    hard-truncated. Provider failure falls back to the subtree's first
    sentence, so collapse always produces something displayable.
    """
    if not subtree_text.strip():
        raise ValueError("subtree text must be non-empty")
    prompt = catalog.render(SUMMARIZE, subtree_context=subtree_text,
                            max_words=config.max_words)
    try:
        completion = complete_with_retry(provider, SUMMARIZE, prompt, backoff_base)
        if word_count(completion) > config.max_words:
            retry_prompt = (f"{prompt}\n\nThe previous summary was too long. "
                            f"It must be under {config.max_words} words.")
            completion = complete_with_retry(provider, SUMMARIZE, retry_prompt, backoff_base)
    except ProviderError:
        return first_sentence(subtree_text)
    if not completion.strip():
        return first_sentence(subtree_text)
    return truncate_words(completion, config.max_words)
