"""Structure operator: annotate a reasoning segment with topic/branch tags.

Structure may degrade but never loses text: if the model paraphrases the
segment or the provider fails twice, the segment survives as a single
topic node holding the raw text.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..chain.nodes import ReasoningNode, ReasoningTree, normalize_ws
from ..chain.parser import NodeEvent, ParseDiagnostic, DiagnosticSeverity, StreamParser, strip_tags
from ..providers.errors import ProviderError
from .catalog import STRUCTURE, PromptCatalog, complete_with_retry


@dataclass(frozen=True)
class TaggedSegment:
    tagged_text: str
    degraded: bool  # True when the completion was discarded for the raw segment


def structure_tagged(segment: str, provider, catalog: PromptCatalog, *,
                     backoff_base: float = 1.0) -> TaggedSegment:
    """Run the structure operator, validating that no text was rewritten."""
    if not segment.strip():
        raise ValueError("segment must be non-empty")
    prompt = catalog.render(STRUCTURE, reasoning=segment)
    try:
        completion = complete_with_retry(provider, STRUCTURE, prompt, backoff_base)
    except ProviderError:
        return TaggedSegment(f"<topic>{segment}</topic>", True)
    if not completion.strip():
        return TaggedSegment(f"<topic>{segment}</topic>", True)
    if strip_tags(completion) != normalize_ws(segment):
        return TaggedSegment(f"<topic>{segment}</topic>", True)
    return TaggedSegment(completion, False)


@dataclass(frozen=True)
class StructuredFragment:
    roots: tuple[ReasoningNode, ...]
    diagnostics: tuple[ParseDiagnostic, ...]
    events: tuple[NodeEvent, ...]
    tagged_text: str
    degraded: bool
    next_id: int


def structure_segment(segment: str, provider, catalog: PromptCatalog, *,
                      start_id: int = 1, backoff_base: float = 1.0) -> StructuredFragment:
    """Structure one segment and parse the result into a forest fragment."""
    tagged = structure_tagged(segment, provider, catalog, backoff_base=backoff_base)
    parser = StreamParser(start_id=start_id)
    events = parser.feed(tagged.tagged_text)
    tail, tree, diags = parser.finalize()
    if tagged.degraded:
        diags = diags + [ParseDiagnostic(
            DiagnosticSeverity.RECOVERED, (0, len(segment)),
            "structure output discarded; segment kept as a single topic")]
    return StructuredFragment(
        roots=tree.roots,
        diagnostics=tuple(diags),
        events=tuple(events + tail),
        tagged_text=tagged.tagged_text,
        degraded=tagged.degraded,
        next_id=parser.next_id,
    )
