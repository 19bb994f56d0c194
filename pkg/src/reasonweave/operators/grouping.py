"""Thought grouping: divide a raw reasoning chain into topical segments.

The model is asked to reuse the input text verbatim. Compliance is
measured with a token-level longest-common-subsequence ratio; below the
floor, a deterministic paragraph split takes over so the pipeline stays
total and never loses text.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..providers.errors import ProviderError
from .catalog import GROUP, PromptCatalog, complete_with_retry

DEFAULT_MAX_SEGMENTS = 8
DEFAULT_PRESERVATION_FLOOR = 0.85

_PARAGRAPH_RE = re.compile(r"\n\s*\n")


@dataclass(frozen=True)
class SegmentationResult:
    segments: tuple[str, ...]
    preservation_score: float


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence over token lists, row-rolling DP.

    On a match the cell is prev[j] + 1, which dominates both other
    candidates, so each row is a running maximum over
    where(match, prev[j] + 1, prev[j + 1]).
    """
    if not a or not b:
        return 0
    if a == b:
        return len(a)
    b_arr = np.array(b, dtype=object)
    prev = np.zeros(len(b) + 1, dtype=np.int32)
    cand = np.empty(len(b) + 1, dtype=np.int32)
    for token in a:
        cand[0] = 0
        cand[1:] = np.where(b_arr == token, prev[:-1] + 1, prev[1:])
        prev = np.maximum.accumulate(cand)
        cand = np.empty(len(b) + 1, dtype=np.int32)
    return int(prev[-1])


def preservation_ratio(source: str, candidate: str) -> float:
    """How much of ``source`` survives, token-wise, in ``candidate``."""
    source_tokens = source.split()
    if not source_tokens:
        return 1.0
    return lcs_length(source_tokens, candidate.split()) / len(source_tokens)


def split_paragraphs(text: str) -> list[str]:
    return [p.strip() for p in _PARAGRAPH_RE.split(text) if p.strip()]


def merge_to_limit(paragraphs: list[str], limit: int) -> list[str]:
    """Merge the shortest adjacent pair until at most ``limit`` remain."""
    parts = list(paragraphs)
    while len(parts) > limit:
        best = min(range(len(parts) - 1), key=lambda i: len(parts[i]) + len(parts[i + 1]))
        parts[best:best + 2] = [parts[best] + "\n\n" + parts[best + 1]]
    return parts


def _fallback(raw: str, max_segments: int) -> SegmentationResult:
    paragraphs = split_paragraphs(raw) or [raw.strip()]
    segments = merge_to_limit(paragraphs, max_segments)
    score = preservation_ratio(raw, "\n\n".join(segments))
    return SegmentationResult(tuple(segments), score)


def group_thoughts(raw_reasoning: str, query: str, provider, catalog: PromptCatalog, *,
                   max_segments: int = DEFAULT_MAX_SEGMENTS,
                   preservation_floor: float = DEFAULT_PRESERVATION_FLOOR,
                   backoff_base: float = 1.0) -> SegmentationResult:
    if not raw_reasoning.strip():
        raise ValueError("raw_reasoning must be non-empty")
    if len(split_paragraphs(raw_reasoning)) <= 1:
        return SegmentationResult((raw_reasoning.strip(),), 1.0)
    prompt = catalog.render(
        GROUP,
        query=query,
        reasoning=raw_reasoning.replace("\n", ""),
        max_segments=max_segments,
    )
    try:
        completion = complete_with_retry(provider, GROUP, prompt, backoff_base)
    except ProviderError:
        return _fallback(raw_reasoning, max_segments)
    segments = split_paragraphs(completion)
    if not segments:
        return _fallback(raw_reasoning, max_segments)
    score = preservation_ratio(raw_reasoning, "\n\n".join(segments))
    if len(segments) > max_segments or score < preservation_floor:
        return _fallback(raw_reasoning, max_segments)
    return SegmentationResult(tuple(segments), score)
