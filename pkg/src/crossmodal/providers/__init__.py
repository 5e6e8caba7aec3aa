from .base import (
    ChatMessage,
    ChatParams,
    ChatProvider,
    DetectedLanguage,
    EncoderProvider,
    LanguageDetector,
    Role,
    SearchProvider,
    WebSearchResult,
)
from .langid import NgramLanguageDetector
from .mock import MockChatProvider, MockEncoderProvider, MockSearchProvider
from .http import HttpChatProvider, HttpEncoderProvider, HttpSearchProvider

__all__ = [
    "ChatMessage",
    "ChatParams",
    "ChatProvider",
    "DetectedLanguage",
    "EncoderProvider",
    "LanguageDetector",
    "Role",
    "SearchProvider",
    "WebSearchResult",
    "NgramLanguageDetector",
    "MockChatProvider",
    "MockEncoderProvider",
    "MockSearchProvider",
    "HttpChatProvider",
    "HttpEncoderProvider",
    "HttpSearchProvider",
]
