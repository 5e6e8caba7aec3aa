"""HTTP clients for the real providers.

Wire contracts:

* chat: ``POST`` JSON ``{model, messages: [{role, content}], temperature}``
  returning ``{choices: [{message: {content}}]}``.
* web search: ``GET`` with ``query``/``count``/``key`` params returning
  ``{items: [{link, title, image}]}``; quota exhaustion is a 429 or an
  error body whose reason mentions the quota.
* encoder sidecar: ``POST /encode`` with a JSON ``{"text": ...}`` body or
  raw image bytes, returning ``{"global": [...], "locals": [[...]]}``;
  ``POST /tokens`` returns ``{"count": n}`` (whitespace fallback when the
  sidecar does not expose it).

All clients share timeout/retry handling: transport errors and timeouts
become ``ProviderUnavailableError`` after the configured retries with
exponential backoff; non-2xx responses become ``ProviderRejectedError``
(or ``QuotaExceededError``); unparseable bodies become
``MalformedResponseError``.  A per-client minimum request interval gives
basic rate limiting.
"""

from __future__ import annotations

import threading
import time

import httpx
import numpy as np

from ..errors import (
    MalformedResponseError,
    ProviderRejectedError,
    ProviderUnavailableError,
    QuotaExceededError,
    UnsupportedPayloadError,
)
from ..representation import Representation
from .base import (
    ChatMessage,
    ChatParams,
    ChatProvider,
    EncoderProvider,
    SearchProvider,
    WebSearchResult,
    looks_like_image,
)

DEFAULT_TIMEOUT_S = 30.0
DEFAULT_RETRIES = 2
BACKOFF_BASE_S = 0.5


class _HttpClientBase:

    def __init__(self, endpoint: str, *, timeout_s: float = DEFAULT_TIMEOUT_S,
                 retries: int = DEFAULT_RETRIES, min_interval_s: float = 0.0,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.retries = retries
        self.min_interval_s = min_interval_s
        self._lock = threading.Lock()
        self._last_request = 0.0
        self._client = httpx.Client(timeout=timeout_s, transport=transport)

    def _throttle(self) -> None:
        if self.min_interval_s <= 0:
            return
        with self._lock:
            wait = self._last_request + self.min_interval_s - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()

    def _request(self, method: str, url: str, **kwargs) -> httpx.Response:
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            self._throttle()
            try:
                return self._client.request(method, url, **kwargs)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last_error = exc
                if attempt < self.retries:
                    time.sleep(BACKOFF_BASE_S * (2 ** attempt))
        raise ProviderUnavailableError(
            f"{url} unreachable after {self.retries + 1} attempts: {last_error}")

    def close(self) -> None:
        self._client.close()


def build_chat_body(messages: list[ChatMessage], params: ChatParams) -> dict:
    """Serialize the chat-completions request body (golden-testable)."""
    return {
        "model": params.model,
        "messages": [{"role": m.role.value, "content": m.content} for m in messages],
        "temperature": params.temperature,
    }


class HttpChatProvider(_HttpClientBase, ChatProvider):

    def __init__(self, endpoint: str, api_key: str = "",
                 params: ChatParams | None = None, **kwargs):
        super().__init__(endpoint, **kwargs)
        self.api_key = api_key
        self.default_params = params or ChatParams()

    def chat(self, messages: list[ChatMessage],
             params: ChatParams | None = None) -> str:
        if not messages:
            raise ValueError("messages must be nonempty")
        body = build_chat_body(messages, params or self.default_params)
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = self._request("POST", self.endpoint, json=body, headers=headers)
        if response.status_code // 100 != 2:
            raise ProviderRejectedError(response.status_code, response.text)
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"unexpected chat response shape: {exc}") from exc


class HttpSearchProvider(_HttpClientBase, SearchProvider):

    def __init__(self, endpoint: str, api_key: str = "", **kwargs):
        super().__init__(endpoint, **kwargs)
        self.api_key = api_key

    def search(self, query: str, count: int) -> list[WebSearchResult]:
        if not 1 <= count <= 100:
            raise ValueError(f"count must be in [1, 100], got {count}")
        params = {"query": query, "count": count}
        if self.api_key:
            params["key"] = self.api_key
        response = self._request("GET", self.endpoint, params=params)
        if response.status_code == 429:
            raise QuotaExceededError("search provider quota exhausted")
        if response.status_code // 100 != 2:
            body = response.text
            if "quota" in body.lower():
                raise QuotaExceededError(body[:200])
            raise ProviderRejectedError(response.status_code, body)
        try:
            items = response.json()["items"]
            results = []
            for pos, item in enumerate(items, start=1):
                results.append(WebSearchResult(
                    image_uri=item["image"] if "image" in item else item["link"],
                    title=item.get("title", ""),
                    source_rank=pos,
                ))
            return results
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponseError(f"unexpected search response shape: {exc}") from exc

    def fetch_thumbnail(self, result: WebSearchResult) -> bytes:
        if result.thumbnail_bytes is not None:
            return result.thumbnail_bytes
        response = self._request("GET", result.image_uri)
        if response.status_code // 100 != 2:
            raise ProviderRejectedError(response.status_code, response.text[:200])
        return response.content


class HttpEncoderProvider(_HttpClientBase, EncoderProvider):

    def __init__(self, endpoint: str, **kwargs):
        super().__init__(endpoint, **kwargs)

    def encode(self, payload: str | bytes) -> Representation:
        if isinstance(payload, str):
            if not payload.strip():
                raise UnsupportedPayloadError("cannot encode empty text")
            response = self._request("POST", f"{self.endpoint}/encode",
                                     json={"text": payload})
        else:
            if not payload:
                raise UnsupportedPayloadError("cannot encode empty image payload")
            if not looks_like_image(payload):
                raise UnsupportedPayloadError("payload is not a JPEG or PNG image")
            response = self._request(
                "POST", f"{self.endpoint}/encode", content=payload,
                headers={"Content-Type": "application/octet-stream"})
        if response.status_code // 100 != 2:
            raise ProviderRejectedError(response.status_code, response.text)
        try:
            data = response.json()
            global_vec = np.asarray(data["global"], dtype=np.float32)
            local_mat = np.asarray(data["locals"], dtype=np.float32)
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponseError(f"unexpected encoder response shape: {exc}") from exc
        if global_vec.ndim != 1 or local_mat.ndim != 2:
            raise MalformedResponseError(
                f"encoder returned shapes {global_vec.shape}/{local_mat.shape}")
        return Representation(global_vec, local_mat)

    def count_tokens(self, text: str) -> int:
        try:
            response = self._request("POST", f"{self.endpoint}/tokens",
                                     json={"text": text})
        except ProviderUnavailableError:
            return len(text.split())
        if response.status_code == 404:
            return len(text.split())
        if response.status_code // 100 != 2:
            raise ProviderRejectedError(response.status_code, response.text)
        try:
            return int(response.json()["count"])
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponseError(f"unexpected token response shape: {exc}") from exc
