from .npy import TensorFileHeader, parse_npy_header, open_npy
from .manifest import StoreManifest, load_manifest
from .store import ReprStore, ItemKind, open_store
from .gallery import (
    Gallery,
    GalleryMode,
    AlbumGallery,
    StoreGallery,
    EphemeralGallery,
    ingest_item,
)

__all__ = [
    "TensorFileHeader",
    "parse_npy_header",
    "open_npy",
    "StoreManifest",
    "load_manifest",
    "ReprStore",
    "ItemKind",
    "open_store",
    "Gallery",
    "GalleryMode",
    "AlbumGallery",
    "StoreGallery",
    "EphemeralGallery",
    "ingest_item",
]
