"""Request and response bodies for every route, as pydantic models."""

from __future__ import annotations

from pydantic import BaseModel, Field


class NormalizedQueryModel(BaseModel):
    original_text: str
    english_text: str
    detected_lang: str
    was_translated: bool
    was_summarized: bool
    token_count: int


class ImageHitModel(BaseModel):
    item_id: str
    uri: str
    score: float
    rank: int


class DescriptionHitModel(BaseModel):
    item_id: str
    score: float
    rank: int
    text: str
    image_id: str
    image_uri: str


class TextSearchRequest(BaseModel):
    query: str
    mode: str = "boon"
    k: int = Field(default=10, ge=1, le=100)


class TextSearchResponse(BaseModel):
    query: NormalizedQueryModel
    mode: str
    hits: list[ImageHitModel]


class ImageSearchResponse(BaseModel):
    hits: list[DescriptionHitModel]


class ChatRequest(BaseModel):
    message: str
    session_id: str | None = None
    images_base64: list[str] = Field(default_factory=list)


class ChatResponse(BaseModel):
    session_id: str
    reply: str
    descriptions: list[str]


class AlbumUploadResponse(BaseModel):
    item_id: str
    uri: str
    count: int


class GalleryItemModel(BaseModel):
    item_id: str
    uri: str


class GalleryPageResponse(BaseModel):
    mode: str
    page: int
    page_size: int
    total: int
    items: list[GalleryItemModel]


class CredentialsRequest(BaseModel):
    username: str
    password: str


class TokenResponse(BaseModel):
    token: str
    username: str


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorResponse(BaseModel):
    detail: str
    machine_code: str
