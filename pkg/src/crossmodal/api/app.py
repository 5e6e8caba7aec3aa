"""FastAPI application factory.

Every route speaks the pydantic models from :mod:`.schemas`.  Every error
leaving the service is a JSON body ``{"detail", "machine_code"}`` whose
status comes from the table below; nothing else ever escapes.  The engine
itself lives in :class:`crossmodal.center.RequestCenter` and is built
once per app from configuration (or injected by tests).
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import secrets
import threading

from fastapi import Depends, FastAPI, Header, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .. import __version__
from ..center import ChatSession, RequestCenter, owner_dirname
from ..config import EngineConfig, build_center
from ..errors import (
    EngineError,
    PayloadTooLargeError,
    UnauthenticatedError,
    UnknownModeError,
    UnsupportedPayloadError,
)
from ..providers.base import JPEG_MAGIC, looks_like_image
from ..store.gallery import GalleryMode
from . import schemas
from .auth import AuthStore

# Complete status table: every machine code the service can emit, and the
# one HTTP status it rides on.  Codes not listed (internal bugs, store
# corruption) fall back to 500/internal.
STATUS_BY_CODE = {
    "empty_text": 400,
    "unsupported_payload": 400,
    "invalid_request": 400,
    "dim_mismatch": 400,
    "unauthenticated": 401,
    "bad_credentials": 401,
    "read_only_gallery": 403,
    "unknown_mode": 404,
    "unknown_item": 404,
    "empty_gallery": 404,
    "no_results": 404,
    "user_exists": 409,
    "capacity_exceeded": 409,
    "too_large": 413,
    "quota_exceeded": 429,
    "provider_rejected": 502,
    "malformed_response": 502,
    "provider_unavailable": 503,
    "empty_pool": 503,
    "not_found": 404,
    "method_not_allowed": 405,
}
DEFAULT_STATUS = 500

# framework-raised statuses that never reach the engine
_HTTP_CODES = {404: "not_found", 405: "method_not_allowed"}

LISTABLE_MODES = (GalleryMode.ALBUM, GalleryMode.BOON)


def _error_response(status: int, detail: str, machine_code: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"detail": detail, "machine_code": machine_code})


def _parse_mode(value: str) -> GalleryMode:
    try:
        return GalleryMode(value)
    except ValueError:
        raise UnknownModeError(f"unknown gallery mode {value!r}") from None


def _query_model(norm) -> schemas.NormalizedQueryModel:
    return schemas.NormalizedQueryModel(
        original_text=norm.original_text,
        english_text=norm.english_text,
        detected_lang=norm.detected_lang,
        was_translated=norm.was_translated,
        was_summarized=norm.was_summarized,
        token_count=norm.token_count,
    )


class SessionBook:
    """In-process chat sessions with one lock per conversation."""

    def __init__(self):
        self._sessions: dict[str, ChatSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def acquire(self, session_id: str | None) -> tuple[ChatSession, threading.Lock]:
        with self._guard:
            if session_id is None:
                session_id = secrets.token_hex(8)
            session = self._sessions.get(session_id)
            if session is None:
                session = ChatSession(session_id)
                self._sessions[session_id] = session
                self._locks[session_id] = threading.Lock()
            return session, self._locks[session_id]


def create_app(config: EngineConfig | None = None,
               center: RequestCenter | None = None,
               auth: AuthStore | None = None) -> FastAPI:
    config = config or EngineConfig()
    center = center or build_center(config)
    auth = auth or AuthStore(config.resolve(config.service.auth_db)
                             if config.service.auth_db != ":memory:"
                             else ":memory:")
    sessions = SessionBook()
    payload_root = config.resolve(config.service.payload_root)
    payload_root.mkdir(parents=True, exist_ok=True)
    max_upload = config.service.max_upload_bytes

    app = FastAPI(title="crossmodal", version=__version__)
    app.state.center = center
    app.state.auth = auth
    app.state.sessions = sessions
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    app.mount("/payloads", StaticFiles(directory=payload_root), name="payloads")
    if config.service.ui_root:
        ui_root = config.resolve(config.service.ui_root)
        if ui_root.is_dir():
            app.mount("/ui", StaticFiles(directory=ui_root, html=True),
                      name="ui")

            @app.get("/", include_in_schema=False)
            def ui_index():
                return RedirectResponse(url="/ui/")

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        status = STATUS_BY_CODE.get(exc.machine_code, DEFAULT_STATUS)
        return _error_response(status, str(exc) or exc.machine_code,
                               exc.machine_code)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error_response(400, str(exc.errors()[:3]), "invalid_request")

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request,
                                     exc: StarletteHTTPException):
        if exc.status_code in _HTTP_CODES:
            return _error_response(exc.status_code, str(exc.detail),
                                   _HTTP_CODES[exc.status_code])
        return _error_response(500, str(exc.detail), "internal")

    @app.exception_handler(Exception)
    async def fallback_handler(request: Request, exc: Exception):
        return _error_response(500, f"{type(exc).__name__}: {exc}", "internal")

    # --- auth helpers -------------------------------------------------------

    def _token_of(authorization: str | None) -> str:
        if not authorization:
            raise UnauthenticatedError("missing Authorization header")
        scheme, _, token = authorization.partition(" ")
        if scheme.lower() != "bearer" or not token:
            raise UnauthenticatedError("expected a bearer token")
        return token

    def require_user(authorization: str | None = Header(default=None)) -> str:
        return auth.resolve(_token_of(authorization))

    def optional_user(authorization: str | None = Header(default=None)) -> str | None:
        if not authorization:
            return None
        return auth.resolve(_token_of(authorization))

    def _read_upload(upload: UploadFile) -> bytes:
        data = upload.file.read(max_upload + 1)
        if len(data) > max_upload:
            raise PayloadTooLargeError(
                f"payload exceeds {max_upload} bytes")
        if not looks_like_image(data):
            raise UnsupportedPayloadError("upload is not a JPEG or PNG image")
        return data

    # --- routes -------------------------------------------------------------

    @app.get("/healthz", response_model=schemas.HealthResponse)
    def healthz():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/auth/register", response_model=schemas.TokenResponse,
              status_code=201)
    def register(body: schemas.CredentialsRequest):
        token = auth.register(body.username, body.password)
        return schemas.TokenResponse(token=token, username=body.username)

    @app.post("/auth/login", response_model=schemas.TokenResponse)
    def login(body: schemas.CredentialsRequest):
        token = auth.login(body.username, body.password)
        return schemas.TokenResponse(token=token, username=body.username)

    @app.post("/search/text", response_model=schemas.TextSearchResponse)
    def search_text(body: schemas.TextSearchRequest,
                    owner: str | None = Depends(optional_user)):
        mode = _parse_mode(body.mode)
        out = center.text_to_image(body.query, mode, body.k, owner=owner)
        return schemas.TextSearchResponse(
            query=_query_model(out.query),
            mode=mode.value,
            hits=[schemas.ImageHitModel(item_id=h.item_id, uri=h.uri,
                                        score=h.score, rank=h.rank)
                  for h in out.hits],
        )

    @app.post("/search/image", response_model=schemas.ImageSearchResponse)
    def search_image(image: UploadFile, k: int = 10):
        if not 1 <= k <= 100:
            raise RequestValidationError(
                [{"loc": ("query", "k"), "msg": "k must be in [1, 100]"}])
        payload = _read_upload(image)
        hits = center.image_to_text(payload, k)
        return schemas.ImageSearchResponse(
            hits=[schemas.DescriptionHitModel(
                item_id=h.item_id, score=h.score, rank=h.rank, text=h.text,
                image_id=h.image_id, image_uri=h.image_uri)
                for h in hits])

    @app.post("/chat", response_model=schemas.ChatResponse)
    def chat(body: schemas.ChatRequest):
        payloads = []
        for blob in body.images_base64:
            try:
                payloads.append(base64.b64decode(blob, validate=True))
            except (binascii.Error, ValueError):
                raise UnsupportedPayloadError(
                    "images_base64 entries must be valid base64") from None
        session, lock = sessions.acquire(body.session_id)
        with lock:
            outcome = center.chat_turn(session, body.message, payloads)
        return schemas.ChatResponse(session_id=session.session_id,
                                    reply=outcome.reply,
                                    descriptions=outcome.descriptions)

    @app.post("/album/upload", response_model=schemas.AlbumUploadResponse,
              status_code=201)
    def album_upload(image: UploadFile, owner: str = Depends(require_user)):
        data = _read_upload(image)
        ext = "jpg" if data.startswith(JPEG_MAGIC) else "png"
        digest = hashlib.sha256(data).hexdigest()[:16]
        rel = f"albums/{owner_dirname(owner)}/{digest}.{ext}"
        target = payload_root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
        item_id = center.ingest_album_image(owner, data, f"/payloads/{rel}")
        return schemas.AlbumUploadResponse(
            item_id=item_id, uri=f"/payloads/{rel}",
            count=center.galleries.album_for(owner).item_count)

    @app.get("/gallery/{mode}/items", response_model=schemas.GalleryPageResponse)
    def gallery_items(mode: str, page: int = 1, page_size: int = 50,
                      owner: str | None = Depends(optional_user)):
        parsed = _parse_mode(mode)
        if parsed not in LISTABLE_MODES:
            raise UnknownModeError(
                f"gallery mode {mode!r} holds no resident items")
        if page < 1 or not 1 <= page_size <= 200:
            raise RequestValidationError(
                [{"loc": ("query",), "msg": "bad page or page_size"}])
        if parsed is GalleryMode.ALBUM:
            if owner is None:
                raise UnauthenticatedError("album listing requires an account")
            album = center.galleries.album_for(owner)
            entries = [(i, album.payload_uri(i)) for i in album.item_ids()]
        else:
            store = center.galleries.boon.store
            entries = [(i, store.image_uri(i)) for i in store.image_ids]
        total = len(entries)
        start = (page - 1) * page_size
        chunk = entries[start:start + page_size]
        return schemas.GalleryPageResponse(
            mode=parsed.value, page=page, page_size=page_size, total=total,
            items=[schemas.GalleryItemModel(item_id=i, uri=u)
                   for i, u in chunk])

    return app
