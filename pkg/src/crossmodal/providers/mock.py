"""Deterministic provider mocks.

Each mock is a pure function of (seed, input): the same construction and
the same calls reproduce byte-identical outputs, which is what makes the
pipeline's golden and property tests stable.  Mocks also record their
calls so tests can assert exact call counts and request contents.
"""

from __future__ import annotations

import hashlib
from typing import Callable

import numpy as np

from ..errors import (
    EmptyTextError,
    QuotaExceededError,
    UnsupportedPayloadError,
)
from ..representation import Representation
from .base import (
    ChatMessage,
    ChatParams,
    ChatProvider,
    EncoderProvider,
    Role,
    SearchProvider,
    WebSearchResult,
    looks_like_image,
    PNG_MAGIC,
)


def _digest(*parts: bytes) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(part)
        h.update(b"\x00")
    return h.digest()


class MockChatProvider(ChatProvider):
    """Scriptable chat mock.

    Reply resolution order: exact match of the last user message in
    ``replies``, then ``handler(messages)`` if given, then a deterministic
    digest-derived fallback.  Every call is appended to ``calls``.
    """

    def __init__(self, replies: dict[str, str] | None = None,
                 handler: Callable[[list[ChatMessage]], str | None] | None = None):
        self.replies = dict(replies or {})
        self.handler = handler
        self.calls: list[list[ChatMessage]] = []

    def chat(self, messages: list[ChatMessage],
             params: ChatParams | None = None) -> str:
        if not messages:
            raise ValueError("messages must be nonempty")
        if messages[-1].role is not Role.USER:
            raise ValueError("last message must be from the user")
        self.calls.append(list(messages))
        prompt = messages[-1].content
        if prompt in self.replies:
            return self.replies[prompt]
        if self.handler is not None:
            reply = self.handler(messages)
            if reply is not None:
                return reply
        return f"mock-reply-{_digest(prompt.encode()).hex()[:8]}"

    @property
    def call_count(self) -> int:
        return len(self.calls)


class MockSearchProvider(SearchProvider):
    """Seeded web-search mock.

    With ``fixtures`` set, returns those results (re-ranked 1..n, truncated
    to ``count``).  Otherwise fabricates a per-query deterministic result
    list whose thumbnails are PNG-signature byte blobs derived from the
    query digest, so the mock encoder accepts them.  ``quota`` limits the
    number of calls before ``QuotaExceededError``.
    """

    def __init__(self, fixtures: list[WebSearchResult] | None = None,
                 seed: int = 0, result_count: int = 40,
                 quota: int | None = None):
        self.fixtures = fixtures
        self.seed = seed
        self.result_count = result_count
        self.quota = quota
        self.calls: list[tuple[str, int]] = []

    def search(self, query: str, count: int) -> list[WebSearchResult]:
        if not query.strip():
            raise EmptyTextError("search query must be nonempty")
        if not 1 <= count <= 100:
            raise ValueError(f"count must be in [1, 100], got {count}")
        if self.quota is not None and len(self.calls) >= self.quota:
            raise QuotaExceededError("mock search quota exhausted")
        self.calls.append((query, count))

        if self.fixtures is not None:
            chosen = self.fixtures[:count]
        else:
            base = _digest(str(self.seed).encode(), query.encode()).hex()[:12]
            n = min(count, self.result_count)
            chosen = [
                WebSearchResult(
                    image_uri=f"https://images.example/{base}/{pos}.png",
                    title=f"result {pos} for {query}",
                    source_rank=pos,
                    thumbnail_bytes=PNG_MAGIC + _digest(
                        str(self.seed).encode(), query.encode(), str(pos).encode()),
                )
                for pos in range(1, n + 1)
            ]
        return [WebSearchResult(r.image_uri, r.title, pos, r.thumbnail_bytes)
                for pos, r in enumerate(chosen, start=1)]


class MockEncoderProvider(EncoderProvider):
    """Content-hash seeded encoder.

    The same payload always encodes to the same representation: a
    unit-norm global vector and unit-norm local rows drawn from an RNG
    seeded by sha256(seed, payload).  ``overrides`` pins exact payloads to
    fixed representations for planted-scenario tests.
    """

    def __init__(self, d_g: int, d_l: int, n_l: int, seed: int = 0,
                 overrides: dict[bytes | str, Representation] | None = None):
        self.d_g = d_g
        self.d_l = d_l
        self.n_l = n_l
        self.seed = seed
        self.overrides = dict(overrides or {})
        self.calls: list[str | bytes] = []

    def encode(self, payload: str | bytes) -> Representation:
        if isinstance(payload, str):
            if not payload.strip():
                raise UnsupportedPayloadError("cannot encode empty text")
            raw = payload.encode("utf-8")
        elif isinstance(payload, bytes):
            if not payload:
                raise UnsupportedPayloadError("cannot encode empty image payload")
            if not looks_like_image(payload):
                raise UnsupportedPayloadError("payload is not a JPEG or PNG image")
            raw = payload
        else:
            raise UnsupportedPayloadError(f"unsupported payload type {type(payload)}")
        self.calls.append(payload)
        if payload in self.overrides:
            return self.overrides[payload]

        seed_bytes = _digest(str(self.seed).encode(), raw)
        rng = np.random.default_rng(np.frombuffer(seed_bytes, dtype=np.uint64))
        global_vec = rng.standard_normal(self.d_g)
        global_vec /= np.linalg.norm(global_vec)
        local_mat = rng.standard_normal((self.n_l, self.d_l))
        local_mat /= np.linalg.norm(local_mat, axis=1, keepdims=True)
        return Representation(global_vec.astype(np.float32),
                              local_mat.astype(np.float32))

    def count_tokens(self, text: str) -> int:
        return len(text.split())
