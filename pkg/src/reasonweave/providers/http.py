"""HTTP clients for chat-completions-style and embeddings APIs."""
from __future__ import annotations

import json
from typing import Iterator, Optional, Union

import httpx

from .config import RoleConfig
from .errors import AuthFailure, EmbeddingFailure, ProviderFailure, ProviderTimeout, TransportFailure
from .streams import ReasonChannel, ReasonStreamEvent, StreamDone, ThinkSplitter


def _headers(role: RoleConfig) -> dict[str, str]:
    headers = {"Content-Type": "application/json"}
    key = role.api_key()
    if key:
        headers["Authorization"] = f"Bearer {key}"
    return headers


def _raise_for_status(response: httpx.Response) -> None:
    if response.status_code in (401, 403):
        raise AuthFailure(f"auth rejected with status {response.status_code}")
    if response.status_code >= 400:
        raise TransportFailure(f"status {response.status_code}: {response.text[:200]}")


def _request(role: RoleConfig, path: str, payload: dict, *,
             client: Optional[httpx.Client] = None) -> dict:
    url = role.endpoint.rstrip("/") + path
    attempts = role.max_retries + 1
    last: Exception = ProviderFailure("no attempt made")
    for _ in range(attempts):
        try:
            if client is not None:
                response = client.post(url, json=payload, headers=_headers(role),
                                       timeout=role.timeout_s)
            else:
                response = httpx.post(url, json=payload, headers=_headers(role),
                                      timeout=role.timeout_s)
            _raise_for_status(response)
            return response.json()
        except httpx.TimeoutException as exc:
            last = ProviderTimeout(str(exc))
        except AuthFailure:
            raise
        except (httpx.HTTPError, TransportFailure, json.JSONDecodeError) as exc:
            last = exc if isinstance(exc, TransportFailure) else TransportFailure(str(exc))
    raise last


class HttpOperatorProvider:
    def __init__(self, role: RoleConfig, client: Optional[httpx.Client] = None):
        self._role = role
        self._client = client

    def complete(self, template_id: str, prompt: str) -> str:
        payload = {
            "model": self._role.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        data = _request(self._role, "/chat/completions", payload, client=self._client)
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderFailure(f"malformed completion payload: {exc}")
        return content or ""


class HttpReasoningProvider:
    """Streams a completion, demultiplexing think vs. answer channels.

    Vendors differ: some expose reasoning as an explicit delta field, others
    inline think tags in the content. Both are supported; the explicit field
    wins when present.
    """

    def __init__(self, role: RoleConfig, client: Optional[httpx.Client] = None):
        self._role = role
        self._client = client or httpx.Client()

    def stream(self, prompt: str) -> Iterator[Union[ReasonStreamEvent, StreamDone]]:
        url = self._role.endpoint.rstrip("/") + "/chat/completions"
        payload = {
            "model": self._role.model,
            "messages": [{"role": "user", "content": prompt}],
            "stream": True,
        }
        splitter = ThinkSplitter()
        explicit_reasoning = False
        tokens: Optional[dict] = None
        try:
            with self._client.stream("POST", url, json=payload, headers=_headers(self._role),
                                     timeout=self._role.timeout_s) as response:
                _raise_for_status_stream(response)
                for line in response.iter_lines():
                    if not line or not line.startswith("data:"):
                        continue
                    data = line[5:].strip()
                    if data == "[DONE]":
                        break
                    try:
                        obj = json.loads(data)
                    except json.JSONDecodeError:
                        continue
                    usage = obj.get("usage")
                    if usage:
                        tokens = usage
                    choices = obj.get("choices") or []
                    if not choices:
                        continue
                    delta = choices[0].get("delta") or {}
                    reasoning = delta.get("reasoning_content") or delta.get("reasoning")
                    if reasoning:
                        explicit_reasoning = True
                        yield ReasonStreamEvent(ReasonChannel.THINK, reasoning)
                    content = delta.get("content")
                    if content:
                        if explicit_reasoning:
                            yield ReasonStreamEvent(ReasonChannel.ANSWER, content)
                        else:
                            yield from splitter.feed(content)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc))
        except httpx.HTTPError as exc:
            raise TransportFailure(str(exc))
        if not explicit_reasoning:
            yield from splitter.flush()
        yield StreamDone(tokens=tokens)


def _raise_for_status_stream(response: httpx.Response) -> None:
    if response.status_code in (401, 403):
        raise AuthFailure(f"auth rejected with status {response.status_code}")
    if response.status_code >= 400:
        raise TransportFailure(f"status {response.status_code}")


class HttpEmbeddingProvider:
    def __init__(self, role: RoleConfig, client: Optional[httpx.Client] = None):
        self._role = role
        self._client = client
        self.model_id = role.model

    def embed(self, texts: list[str]) -> list[list[float]]:
        payload = {"model": self._role.model, "input": texts}
        try:
            data = _request(self._role, "/embeddings", payload, client=self._client)
            rows = sorted(data["data"], key=lambda r: r.get("index", 0))
            vectors = [list(map(float, row["embedding"])) for row in rows]
        except Exception as exc:
            raise EmbeddingFailure(str(exc))
        if len(vectors) != len(texts):
            raise EmbeddingFailure(
                f"expected {len(texts)} vectors, got {len(vectors)}")
        return vectors
