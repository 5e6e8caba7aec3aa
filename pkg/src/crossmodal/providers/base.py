"""Provider contracts for the four external capabilities.

Each contract is narrow by design: a chat LLM, a web image search, an
out-of-process encoder, and language detection.  Every operation either
succeeds or raises one of the provider errors from
:mod:`crossmodal.errors` — no unclassified failures escape.  Deterministic
in-process mocks exist for each (see :mod:`crossmodal.providers.mock`),
so full pipelines run reproducibly without a network.
"""

from __future__ import annotations

import abc
import enum
from dataclasses import dataclass, field

from ..representation import Representation


class Role(enum.Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


@dataclass(frozen=True)
class ChatMessage:
    role: Role
    content: str


@dataclass(frozen=True)
class ChatParams:
    model: str = "gpt-3.5-turbo"
    temperature: float = 0.2


@dataclass(frozen=True)
class WebSearchResult:
    image_uri: str
    title: str
    source_rank: int  # 1-based position in the provider's own ordering
    thumbnail_bytes: bytes | None = field(default=None, repr=False)


@dataclass(frozen=True)
class DetectedLanguage:
    lang_code: str  # ISO-639-1, or "und" for undetermined
    confidence: float


class ChatProvider(abc.ABC):
    """Chat-completions LLM behind an HTTP wire contract or a mock."""

    @abc.abstractmethod
    def chat(self, messages: list[ChatMessage],
             params: ChatParams | None = None) -> str:
        """Return the assistant's reply text.

        ``messages`` must be nonempty and end with a user message.
        """


class SearchProvider(abc.ABC):
    """External web image search."""

    @abc.abstractmethod
    def search(self, query: str, count: int) -> list[WebSearchResult]:
        """Return up to ``count`` results ordered by ascending source_rank."""

    def fetch_thumbnail(self, result: WebSearchResult) -> bytes:
        """Thumbnail bytes for a result, fetching them if not inlined."""
        from ..errors import ProviderUnavailableError

        if result.thumbnail_bytes is None:
            raise ProviderUnavailableError(
                f"no thumbnail available for {result.image_uri}")
        return result.thumbnail_bytes


class EncoderProvider(abc.ABC):
    """Encoder sidecar producing representations; also owns token counting."""

    @abc.abstractmethod
    def encode(self, payload: str | bytes) -> Representation:
        """Encode query text (str) or image bytes (JPEG/PNG) deterministically."""

    @abc.abstractmethod
    def count_tokens(self, text: str) -> int:
        """Token count under the encoder's tokenizer; monotone under concatenation."""


class LanguageDetector(abc.ABC):

    @abc.abstractmethod
    def detect(self, text: str) -> DetectedLanguage:
        """Most likely language of nonempty text."""


JPEG_MAGIC = b"\xff\xd8\xff"
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def looks_like_image(payload: bytes) -> bool:
    """Cheap signature sniff for the accepted image payload types."""
    return payload.startswith(JPEG_MAGIC) or payload.startswith(PNG_MAGIC)
