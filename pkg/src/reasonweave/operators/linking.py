"""Link operator: entailment edges from answer sentences to reasoning nodes.

Linking is an enhancement: any provider or parse failure yields an empty
map and the answer remains usable. Invalid edges are dropped with
warnings; at most one edge survives per hypothesis.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

from ..providers.errors import ProviderError
from .catalog import LINK, PromptCatalog, complete_with_retry

logger = logging.getLogger(__name__)

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class LinkEdge:
    hypothesis_id: int
    premise_id: int
    strength: float

    def to_dict(self) -> dict:
        return {
            "hypothesis_id": self.hypothesis_id,
            "premise_id": self.premise_id,
            "strength": self.strength,
        }


@dataclass(frozen=True)
class LinkMap:
    edges: tuple[LinkEdge, ...] = ()

    def for_hypothesis(self, hypothesis_id: int) -> tuple[LinkEdge, ...]:
        return tuple(e for e in self.edges if e.hypothesis_id == hypothesis_id)

    def to_dict(self) -> dict:
        return {"edges": [e.to_dict() for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> "LinkMap":
        return cls(edges=tuple(
            LinkEdge(int(e["hypothesis_id"]), int(e["premise_id"]), float(e["strength"]))
            for e in data.get("edges", [])))


def _extract_json_array(completion: str):
    for candidate in (completion, *_FENCE_RE.findall(completion)):
        candidate = candidate.strip()
        try:
            value = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(value, list):
            return value
    start, end = completion.find("["), completion.rfind("]")
    if 0 <= start < end:
        try:
            value = json.loads(completion[start:end + 1])
            if isinstance(value, list):
                return value
        except json.JSONDecodeError:
            pass
    return None


def validate_edges(raw, premise_ids: set[int], hypothesis_ids: set[int]) -> LinkMap:
    """Keep only well-formed edges over known ids; one per hypothesis (highest strength)."""
    best: dict[int, LinkEdge] = {}
    for item in raw:
        if not isinstance(item, dict):
            logger.warning("link edge is not an object: %r", item)
            continue
        premise = item.get("entailing_premise")
        if not isinstance(premise, dict):
            logger.warning("link edge missing entailing_premise: %r", item)
            continue
        try:
            hypothesis_id = int(item.get("hypothesis_id"))
            premise_id = int(premise.get("premise_id"))
            strength = float(premise.get("entailment_strength"))
        except (TypeError, ValueError):
            logger.warning("link edge has malformed ids or strength: %r", item)
            continue
        if hypothesis_id not in hypothesis_ids:
            logger.warning("link edge references unknown hypothesis %s", hypothesis_id)
            continue
        if premise_id not in premise_ids:
            logger.warning("link edge references unknown premise %s", premise_id)
            continue
        if not 0.0 <= strength <= 1.0:
            logger.warning("link edge strength %s outside [0, 1]", strength)
            continue
        edge = LinkEdge(hypothesis_id, premise_id, strength)
        current = best.get(hypothesis_id)
        if current is None or edge.strength > current.strength:
            best[hypothesis_id] = edge
    ordered = sorted(best.values(), key=lambda e: e.hypothesis_id)
    return LinkMap(tuple(ordered))


def link(nodes: list[tuple[int, str]], answer_units: list[tuple[int, str]],
         provider, catalog: PromptCatalog, *, backoff_base: float = 1.0) -> LinkMap:
    if not nodes or not answer_units:
        raise ValueError("nodes and answer_units must be non-empty")
    premises = json.dumps([{"id": i, "content": t} for i, t in nodes], ensure_ascii=False)
    hypotheses = json.dumps([{"id": i, "content": t} for i, t in answer_units],
                            ensure_ascii=False)
    prompt = catalog.render(LINK, premises=premises, hypotheses=hypotheses)
    try:
        completion = complete_with_retry(provider, LINK, prompt, backoff_base)
    except ProviderError as exc:
        logger.warning("link operator failed, answer stays unlinked: %s", exc)
        return LinkMap()
    raw = _extract_json_array(completion)
    if raw is None:
        logger.warning("link completion was not a JSON array, answer stays unlinked")
        return LinkMap()
    return validate_edges(raw, {i for i, _ in nodes}, {i for i, _ in answer_units})
