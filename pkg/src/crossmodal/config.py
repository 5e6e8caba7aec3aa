"""YAML configuration and the factory that assembles a running engine.

A config file is optional: the zero-argument default wires deterministic
in-process mock providers and no stores, which is enough to boot the
service and exercise every route.  Secrets never live in the file; the
environment variables ``LLM_API_KEY``, ``SEARCH_API_KEY``, and
``ENCODER_ENDPOINT`` override their config counterparts when set.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .center import (
    HISTORY_LIMIT,
    SUMMARIZE_ATTEMPTS,
    TOKEN_LIMIT,
    WEB_RESULT_COUNT,
    GalleryRegistry,
    RequestCenter,
)
from .providers.base import ChatParams
from .providers.http import HttpChatProvider, HttpEncoderProvider, HttpSearchProvider
from .providers.langid import NgramLanguageDetector
from .providers.mock import (
    MockChatProvider,
    MockEncoderProvider,
    MockSearchProvider,
)
from .similarity import ScorerConfig
from .store.store import ReprStore, open_store


@dataclass
class ProviderConfig:
    kind: str = "mock"  # "mock" or "http"
    endpoint: str = ""
    api_key: str = ""
    model: str = "gpt-3.5-turbo"
    temperature: float = 0.2
    d_g: int = 64
    d_l: int = 64
    n_l: int = 16
    seed: int = 0


@dataclass
class StoreConfig:
    manifest: str = ""  # shared gallery plus chat description pool
    album_root: str = ""
    album_capacity: int = 500


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    auth_db: str = "auth.sqlite3"
    payload_root: str = "payloads"
    max_upload_bytes: int = 10 * 1024 * 1024
    ui_root: str | None = None  # built web assets, mounted at /ui when set


@dataclass
class LimitsConfig:
    token_limit: int = TOKEN_LIMIT
    summarize_attempts: int = SUMMARIZE_ATTEMPTS
    web_result_count: int = WEB_RESULT_COUNT
    history_limit: int = HISTORY_LIMIT


@dataclass
class EngineConfig:
    chat: ProviderConfig = field(default_factory=ProviderConfig)
    search: ProviderConfig = field(default_factory=ProviderConfig)
    encoder: ProviderConfig = field(default_factory=ProviderConfig)
    store: StoreConfig = field(default_factory=StoreConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    limits: LimitsConfig = field(default_factory=LimitsConfig)
    alpha: float = 0.5
    base_dir: Path = field(default_factory=Path.cwd)

    def resolve(self, path: str) -> Path:
        """Resolve a config-relative path against the config file's home."""
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def _fill(target, payload: dict) -> None:
    for key, value in payload.items():
        if not hasattr(target, key):
            raise ValueError(f"unknown config key {key!r}")
        setattr(target, key, value)


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Parse a YAML config file and apply environment overrides."""
    config = EngineConfig()
    if path is not None:
        path = Path(path)
        payload = yaml.safe_load(path.read_text("utf-8")) or {}
        config.base_dir = path.parent.resolve()
        for section in ("chat", "search", "encoder"):
            if section in payload.get("providers", {}):
                _fill(getattr(config, section), payload["providers"][section])
        for section in ("store", "service", "limits"):
            if section in payload:
                _fill(getattr(config, section), payload[section])
        if "alpha" in payload.get("scoring", {}):
            config.alpha = float(payload["scoring"]["alpha"])

    if os.environ.get("LLM_API_KEY"):
        config.chat.api_key = os.environ["LLM_API_KEY"]
    if os.environ.get("SEARCH_API_KEY"):
        config.search.api_key = os.environ["SEARCH_API_KEY"]
    if os.environ.get("ENCODER_ENDPOINT"):
        config.encoder.endpoint = os.environ["ENCODER_ENDPOINT"]
        config.encoder.kind = "http"
    return config


def build_chat_provider(cfg: ProviderConfig):
    if cfg.kind == "http":
        params = ChatParams(model=cfg.model, temperature=cfg.temperature)
        return HttpChatProvider(cfg.endpoint, cfg.api_key, params=params)
    if cfg.kind == "mock":
        return MockChatProvider()
    raise ValueError(f"unknown chat provider kind {cfg.kind!r}")


def build_search_provider(cfg: ProviderConfig):
    if cfg.kind == "http":
        return HttpSearchProvider(cfg.endpoint, cfg.api_key)
    if cfg.kind == "mock":
        return MockSearchProvider(seed=cfg.seed)
    raise ValueError(f"unknown search provider kind {cfg.kind!r}")


def build_encoder_provider(cfg: ProviderConfig):
    if cfg.kind == "http":
        return HttpEncoderProvider(cfg.endpoint)
    if cfg.kind == "mock":
        return MockEncoderProvider(d_g=cfg.d_g, d_l=cfg.d_l, n_l=cfg.n_l,
                                   seed=cfg.seed)
    raise ValueError(f"unknown encoder provider kind {cfg.kind!r}")


def open_configured_store(config: EngineConfig) -> ReprStore | None:
    if not config.store.manifest:
        return None
    return open_store(config.resolve(config.store.manifest))


def build_center(config: EngineConfig,
                 store: ReprStore | None = None) -> RequestCenter:
    """Assemble a request center from parsed configuration."""
    if store is None:
        store = open_configured_store(config)
    album_root = (config.resolve(config.store.album_root)
                  if config.store.album_root else None)
    encoder = build_encoder_provider(config.encoder)
    if config.encoder.kind == "mock" and store is not None:
        # mock dims must line up with the store being searched
        encoder.d_g = store.manifest.d_g
        encoder.d_l = store.manifest.d_l
    galleries = GalleryRegistry(boon_store=store, album_root=album_root,
                                album_capacity=config.store.album_capacity)
    return RequestCenter(
        encoder=encoder,
        chat=build_chat_provider(config.chat),
        search=build_search_provider(config.search),
        detector=NgramLanguageDetector(),
        galleries=galleries,
        description_pool=store,
        scorer=ScorerConfig(alpha=config.alpha),
        chat_params=ChatParams(model=config.chat.model,
                               temperature=config.chat.temperature),
        token_limit=config.limits.token_limit,
        summarize_attempts=config.limits.summarize_attempts,
        web_result_count=config.limits.web_result_count,
        history_limit=config.limits.history_limit,
    )
