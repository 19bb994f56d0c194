"""Deterministic scripted providers for tests, fixtures, and replay.

Fixture files are JSON arrays of ``{"match": {"template_id", "input_digest"},
"completion": str}`` consumed strictly in order. A digest mismatch is a hard
failure: it means the rendered prompts have drifted from the fixtures.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .errors import FixtureMismatch
from .streams import ReasonStreamEvent, StreamDone, ThinkSplitter

REASON_TEMPLATE_ID = "reason"
DIGEST_LENGTH = 16


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:DIGEST_LENGTH]


@dataclass(frozen=True)
class Fixture:
    template_id: str
    completion: str
    input_digest: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "match": {"template_id": self.template_id, "input_digest": self.input_digest},
            "completion": self.completion,
        }


def make_fixture(template_id: str, prompt: str, completion: str) -> Fixture:
    """Build a fixture whose digest is computed from the rendered prompt."""
    return Fixture(template_id, completion, prompt_digest(prompt))


def load_fixtures(path: Union[str, Path]) -> list[Fixture]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    fixtures = []
    for entry in data:
        match = entry.get("match", {})
        fixtures.append(Fixture(
            template_id=match.get("template_id", ""),
            completion=entry["completion"],
            input_digest=match.get("input_digest"),
        ))
    return fixtures


def dump_fixtures(fixtures: Iterable[Fixture], path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps([f.to_dict() for f in fixtures], indent=2, ensure_ascii=False),
        encoding="utf-8",
    )


class FixtureQueue:
    """Shared in-order fixture consumption for the scripted providers."""

    def __init__(self, fixtures: Iterable[Fixture]):
        self._fixtures = list(fixtures)
        self._cursor = 0

    @property
    def remaining(self) -> int:
        return len(self._fixtures) - self._cursor

    def take(self, template_id: str, prompt: str) -> str:
        if self._cursor >= len(self._fixtures):
            raise FixtureMismatch(
                f"no fixture left for template '{template_id}'", template_id)
        fixture = self._fixtures[self._cursor]
        if fixture.template_id != template_id:
            raise FixtureMismatch(
                f"fixture {self._cursor} is for template '{fixture.template_id}', "
                f"got request for '{template_id}'", template_id)
        if fixture.input_digest is not None:
            actual = prompt_digest(prompt)
            if actual != fixture.input_digest:
                raise FixtureMismatch(
                    f"digest mismatch for template '{template_id}': fixture expects "
                    f"{fixture.input_digest}, rendered prompt hashes to {actual}",
                    template_id)
        self._cursor += 1
        return fixture.completion


class ScriptedOperatorProvider:
    """Replays recorded operator completions keyed by template id and digest."""

    def __init__(self, queue: FixtureQueue):
        self._queue = queue

    def complete(self, template_id: str, prompt: str) -> str:
        return self._queue.take(template_id, prompt)


class ScriptedReasoningProvider:
    """Replays a recorded reasoning completion as a chunked think/answer stream."""

    def __init__(self, queue: FixtureQueue, chunk_size: int = 16):
        self._queue = queue
        self._chunk_size = max(1, chunk_size)

    def stream(self, prompt: str) -> Iterator[Union[ReasonStreamEvent, StreamDone]]:
        completion = self._queue.take(REASON_TEMPLATE_ID, prompt)
        splitter = ThinkSplitter()
        for start in range(0, len(completion), self._chunk_size):
            yield from splitter.feed(completion[start:start + self._chunk_size])
        yield from splitter.flush()
        yield StreamDone(tokens=None)


_TOKEN_RE = re.compile(r"[a-z0-9']+")


class HashingEmbedder:
    """Deterministic bag-of-hashed-tokens embedder for offline tests.

    Tokens hash into a fixed number of buckets; counts are L2-normalized.
    Identical texts embed identically; texts with disjoint vocabulary are
    orthogonal.
    """

    def __init__(self, dim: int = 256):
        self.dim = dim
        self.model_id = f"hashing-bag-{dim}"

    def embed(self, texts: list[str]) -> list[list[float]]:
        return [self._one(t) for t in texts]

    def _one(self, text: str) -> list[float]:
        vec = [0.0] * self.dim
        for token in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.sha1(token.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:4], "big") % self.dim
            vec[bucket] += 1.0
        norm = sum(v * v for v in vec) ** 0.5
        if norm > 0:
            vec = [v / norm for v in vec]
        return vec


def cosine(a: list[float], b: list[float]) -> float:
    num = sum(x * y for x, y in zip(a, b))
    na = sum(x * x for x in a) ** 0.5
    nb = sum(y * y for y in b) ** 0.5
    if na == 0 or nb == 0:
        return 0.0
    return num / (na * nb)
