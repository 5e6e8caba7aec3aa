"""Request orchestration: query normalization, search routing, chat grounding.

This module glues the providers to the scoring core.  Every query passes
through :meth:`RequestCenter.normalize_query` before encoding: language
detection (local, no network), translation to English (one LLM call, only
for non-English input), and length reduction (at most two summarization
calls, then a hard truncation that never calls the LLM again).

Chat turns are grounded by retrieving the best-matching description from
a precomputed pool for each uploaded image and inlining those descriptions
into the prompt, so a text-only LLM can answer as if it saw the images.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .errors import (
    EmptyGalleryError,
    EmptyPoolError,
    EmptyTextError,
    NoResultsError,
    ProviderUnavailableError,
    UnauthenticatedError,
)
from .providers.base import (
    ChatMessage,
    ChatParams,
    ChatProvider,
    EncoderProvider,
    LanguageDetector,
    Role,
    SearchProvider,
    WebSearchResult,
)
from .providers.langid import NgramLanguageDetector
from .similarity import ScorerConfig, fused_score, rank
from .store.gallery import AlbumGallery, Gallery, GalleryMode, StoreGallery
from .store.store import ReprStore
from .templates import (
    SYSTEM_GROUNDED,
    SYSTEM_PLAIN,
    description_block,
    summarization_prompt,
    translation_prompt,
)

TOKEN_LIMIT = 77
SUMMARIZE_ATTEMPTS = 2
WEB_RESULT_COUNT = 40
HISTORY_LIMIT = 20  # messages of prior conversation kept in the prompt


@dataclass(frozen=True)
class NormalizedQuery:
    """A query after detection, translation, and length reduction."""

    original_text: str
    english_text: str
    detected_lang: str
    was_translated: bool
    was_summarized: bool
    token_count: int


@dataclass(frozen=True)
class ImageHit:
    """One ranked image, resolvable to a displayable URI."""

    item_id: str
    uri: str
    score: float
    rank: int


@dataclass(frozen=True)
class DescriptionHit:
    """One ranked description plus the image it describes."""

    item_id: str
    score: float
    rank: int
    text: str
    image_id: str
    image_uri: str


@dataclass(frozen=True)
class WebRankedResult:
    """A web-search result with its engine score and new position."""

    result: WebSearchResult
    score: float
    rank: int


@dataclass(frozen=True)
class TextSearchResult:
    query: NormalizedQuery
    mode: GalleryMode
    hits: list[ImageHit]


@dataclass(frozen=True)
class ChatTurnOutcome:
    reply: str
    descriptions: list[str]


def truncate_to_token_limit(text: str, count_tokens: Callable[[str], int],
                            limit: int) -> str:
    """Longest whitespace-word prefix of ``text`` within ``limit`` tokens.

    Binary search over prefix lengths; correctness relies on the counter
    being monotone under concatenation, which the encoder contract
    guarantees.
    """
    words = text.split()
    lo, hi = 0, len(words)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if count_tokens(" ".join(words[:mid])) <= limit:
            lo = mid
        else:
            hi = mid - 1
    return " ".join(words[:lo])


def compose_user_content(user_text: str, descriptions: Sequence[str]) -> str:
    """User message body: numbered description block, then the question."""
    if not descriptions:
        return user_text
    return f"{description_block(list(descriptions))}\n{user_text}"


def render_messages(messages: Sequence[ChatMessage]) -> str:
    """Canonical serialization of a prompt, stable across runs.

    Used for golden comparisons: two prompts are identical iff their
    renderings are byte-identical.
    """
    payload = [{"role": m.role.value, "content": m.content} for m in messages]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


class ChatSession:
    """Conversation state: past turns and whether images ever entered it.

    Mutations happen only through :meth:`append_exchange`, which the
    request center calls strictly after the LLM reply arrived, so a failed
    turn leaves the session untouched.
    """

    def __init__(self, session_id: str,
                 turns: list[ChatMessage] | None = None,
                 has_descriptions: bool = False):
        self.session_id = session_id
        self.turns: list[ChatMessage] = list(turns or [])
        self.has_descriptions = has_descriptions

    def append_exchange(self, user_content: str, reply: str,
                        descriptions: Sequence[str] = ()) -> None:
        self.turns.append(ChatMessage(Role.USER, user_content))
        self.turns.append(ChatMessage(Role.ASSISTANT, reply))
        if descriptions:
            self.has_descriptions = True

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "has_descriptions": self.has_descriptions,
            "turns": [{"role": m.role.value, "content": m.content}
                      for m in self.turns],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ChatSession":
        turns = [ChatMessage(Role(t["role"]), t["content"])
                 for t in payload["turns"]]
        return cls(payload["session_id"], turns,
                   bool(payload["has_descriptions"]))


_SAFE_OWNER_RE = re.compile(r"^[A-Za-z0-9_-]+$")


def owner_dirname(owner: str) -> str:
    """Filesystem-safe directory name for an account."""
    if _SAFE_OWNER_RE.match(owner):
        return owner
    return "h" + hashlib.sha256(owner.encode("utf-8")).hexdigest()[:24]


class GalleryRegistry:
    """Resolves a (mode, owner) pair to a concrete gallery.

    The shared gallery is one read-only store; albums are created lazily
    per owner and persisted under ``album_root/<owner>`` when a root is
    configured.  Web-search mode has no resident gallery and is rejected
    here; its per-query candidates never outlive the request.
    """

    def __init__(self, boon_store: ReprStore | None = None,
                 album_root: str | Path | None = None,
                 album_capacity: int = 500):
        self._boon = StoreGallery(boon_store) if boon_store is not None else None
        self._album_root = Path(album_root) if album_root is not None else None
        self._album_capacity = album_capacity
        self._albums: dict[str, AlbumGallery] = {}
        self._lock = threading.Lock()

    @property
    def boon(self) -> StoreGallery:
        if self._boon is None:
            raise EmptyGalleryError("no shared gallery is configured")
        return self._boon

    def album_for(self, owner: str) -> AlbumGallery:
        with self._lock:
            gallery = self._albums.get(owner)
            if gallery is None:
                persist_dir = None
                if self._album_root is not None:
                    persist_dir = self._album_root / owner_dirname(owner)
                gallery = AlbumGallery(owner, self._album_capacity, persist_dir)
                self._albums[owner] = gallery
            return gallery

    def gallery(self, mode: GalleryMode, owner: str | None = None) -> Gallery:
        if mode is GalleryMode.BOON:
            return self.boon
        if mode is GalleryMode.ALBUM:
            if owner is None:
                raise UnauthenticatedError("album mode requires an account")
            return self.album_for(owner)
        raise ValueError(f"mode {mode.value} has no resident gallery")


class RequestCenter:
    """Front door of the engine: normalization, search, and chat."""

    def __init__(self, *, encoder: EncoderProvider, chat: ChatProvider,
                 search: SearchProvider | None = None,
                 detector: LanguageDetector | None = None,
                 galleries: GalleryRegistry | None = None,
                 description_pool: ReprStore | None = None,
                 scorer: ScorerConfig | None = None,
                 chat_params: ChatParams | None = None,
                 token_limit: int = TOKEN_LIMIT,
                 summarize_attempts: int = SUMMARIZE_ATTEMPTS,
                 web_result_count: int = WEB_RESULT_COUNT,
                 history_limit: int = HISTORY_LIMIT):
        self._encoder = encoder
        self._chat = chat
        self._search = search
        self._detector = detector or NgramLanguageDetector()
        self.galleries = galleries or GalleryRegistry()
        self._pool = description_pool
        self._scorer = scorer or ScorerConfig()
        self._chat_params = chat_params
        self._token_limit = token_limit
        self._summarize_attempts = summarize_attempts
        self._web_result_count = web_result_count
        self._history_limit = history_limit

    # --- query normalization ------------------------------------------------

    def normalize_query(self, text: str) -> NormalizedQuery:
        """Detect, translate, and shorten a raw query.

        English input within the token limit makes zero LLM calls.
        Non-English input makes exactly one translation call.  Text still
        over the limit gets at most ``summarize_attempts`` summarization
        calls, then a word-prefix truncation as the final guarantee.
        """
        if not text or not text.strip():
            raise EmptyTextError("query text is empty")
        detected = self._detector.detect(text)
        was_translated = detected.lang_code != "en"
        english = text
        if was_translated:
            english = self._chat.chat(
                [ChatMessage(Role.USER, translation_prompt(text))],
                self._chat_params)
        was_summarized = False
        count = self._encoder.count_tokens(english)
        for _ in range(self._summarize_attempts):
            if count <= self._token_limit:
                break
            english = self._chat.chat(
                [ChatMessage(Role.USER, summarization_prompt(english))],
                self._chat_params)
            was_summarized = True
            count = self._encoder.count_tokens(english)
        if count > self._token_limit:
            english = truncate_to_token_limit(
                english, self._encoder.count_tokens, self._token_limit)
            was_summarized = True
            count = self._encoder.count_tokens(english)
        return NormalizedQuery(text, english, detected.lang_code,
                               was_translated, was_summarized, count)

    # --- search -------------------------------------------------------------

    def text_to_image(self, query_text: str, mode: GalleryMode, k: int,
                      owner: str | None = None) -> TextSearchResult:
        """Rank a gallery's images against a raw text query.

        Web-search mode fetches and re-ranks fresh results; the other
        modes score the resident gallery.  ``k`` past the gallery size
        returns every item.
        """
        norm = self.normalize_query(query_text)
        if mode is GalleryMode.GOOGLE:
            ranked = self._rerank_web(norm)
            hits = [ImageHit(r.result.image_uri, r.result.image_uri,
                             r.score, r.rank)
                    for r in ranked[:k]]
            return TextSearchResult(norm, mode, hits)
        gallery = self.galleries.gallery(mode, owner)
        candidates = gallery.image_candidates()
        query_rep = self._encoder.encode(norm.english_text)
        ranked = rank(query_rep, candidates, k, self._scorer)
        hits = [ImageHit(r.item_id, gallery.payload_uri(r.item_id),
                         r.score, r.rank)
                for r in ranked]
        return TextSearchResult(norm, mode, hits)

    def image_to_text(self, image_payload: bytes, k: int) -> list[DescriptionHit]:
        """Rank the shared gallery's descriptions against an image query.

        Only the shared gallery carries a description corpus, so this
        always searches it; each hit resolves to the described image.
        """
        gallery = self.galleries.boon
        candidates = gallery.description_candidates()
        query_rep = self._encoder.encode(image_payload)
        ranked = rank(query_rep, candidates, k, self._scorer)
        store = gallery.store
        hits = []
        for r in ranked:
            image_id = store.resolve_links(r.item_id)
            hits.append(DescriptionHit(r.item_id, r.score, r.rank,
                                       store.description_text(r.item_id),
                                       image_id, store.image_uri(image_id)))
        return hits

    def google_mode_search(self, query_text: str) -> list[WebRankedResult]:
        """Fetch web image results and re-rank them by engine score.

        The output is a permutation of the fetched set: every result is
        scored against the normalized query and reordered by score
        descending, with the provider's own ordering breaking ties.
        """
        return self._rerank_web(self.normalize_query(query_text))

    def _rerank_web(self, norm: NormalizedQuery) -> list[WebRankedResult]:
        if self._search is None:
            raise ProviderUnavailableError("no web search provider configured")
        results = self._search.search(norm.english_text, self._web_result_count)
        if not results:
            raise NoResultsError(
                f"web search returned nothing for {norm.english_text!r}")
        query_rep = self._encoder.encode(norm.english_text)
        scored = []
        for res in results:
            thumb = self._search.fetch_thumbnail(res)
            scored.append((fused_score(query_rep, self._encoder.encode(thumb),
                                       self._scorer), res))
        scored.sort(key=lambda pair: (-pair[0], pair[1].source_rank))
        return [WebRankedResult(res, score, pos)
                for pos, (score, res) in enumerate(scored, 1)]

    # --- chat grounding -----------------------------------------------------

    def describe_images(self, image_payloads: Sequence[bytes]) -> list[str]:
        """Best-matching pool description for each uploaded image, in order."""
        if not image_payloads:
            return []
        if self._pool is None or self._pool.description_count == 0:
            raise EmptyPoolError("no description pool is configured")
        candidates = StoreGallery(self._pool).description_candidates()
        texts = []
        for payload in image_payloads:
            rep = self._encoder.encode(payload)
            top = rank(rep, candidates, 1, self._scorer)[0]
            texts.append(self._pool.description_text(top.item_id))
        return texts

    def build_chat_prompt(self, session: ChatSession, user_text: str,
                          descriptions: Sequence[str] = ()) -> list[ChatMessage]:
        """Assemble the full message list for one turn.

        The system message carries the pretend-to-view instruction only
        once descriptions exist anywhere in the conversation; history is
        capped at the most recent messages.
        """
        grounded = session.has_descriptions or bool(descriptions)
        messages = [ChatMessage(Role.SYSTEM,
                                SYSTEM_GROUNDED if grounded else SYSTEM_PLAIN)]
        if self._history_limit > 0:
            messages.extend(session.turns[-self._history_limit:])
        messages.append(ChatMessage(Role.USER,
                                    compose_user_content(user_text, descriptions)))
        return messages

    def chat_turn(self, session: ChatSession, user_text: str,
                  image_payloads: Sequence[bytes] = ()) -> ChatTurnOutcome:
        """Run one conversation turn, grounding any uploaded images.

        The session mutates only after the LLM reply arrives; any failure
        along the way leaves it exactly as it was.
        """
        if not user_text or not user_text.strip():
            raise EmptyTextError("chat message is empty")
        descriptions = self.describe_images(list(image_payloads))
        messages = self.build_chat_prompt(session, user_text, descriptions)
        reply = self._chat.chat(messages, self._chat_params)
        session.append_exchange(messages[-1].content, reply, descriptions)
        return ChatTurnOutcome(reply, descriptions)

    # --- gallery ingestion --------------------------------------------------

    def ingest_album_image(self, owner: str, payload: bytes,
                           payload_uri: str) -> str:
        """Encode an uploaded image and add it to the owner's album."""
        rep = self._encoder.encode(payload)
        return self.galleries.album_for(owner).ingest(payload_uri, rep)
