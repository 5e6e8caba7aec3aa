"""Read-only representation store over memory-mapped tensor files.

A store handle is immutable after open and safe to share across concurrent
readers.  Opening validates every tensor file's dtype and shape against the
manifest: the manifest is authoritative metadata, the file is authoritative
data, and any disagreement is a hard error rather than a silent truncation.
"""

from __future__ import annotations

import enum
from pathlib import Path

import numpy as np

from ..errors import DtypeMismatchError, ShapeMismatchError, UnknownItemError
from ..representation import Representation
from .manifest import StoreManifest, load_manifest
from .npy import open_npy

SUPPORTED_DTYPES = ("float16", "float32", "float64")


class ItemKind(enum.Enum):
    IMAGE = "image"
    DESCRIPTION = "description"


def _check_array(name: str, arr: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if arr.dtype.name not in SUPPORTED_DTYPES:
        raise DtypeMismatchError(f"{name}: dtype {arr.dtype} not a supported float type")
    if arr.shape != shape:
        raise ShapeMismatchError(f"{name}: file shape {arr.shape} != manifest shape {shape}")
    return arr


class ReprStore:
    """Random access to precomputed representations, keyed by item id.

    Lookups never encode anything and never load whole files: each access
    touches only the mapped rows of the requested item.
    """

    def __init__(self, manifest: StoreManifest, base_dir: Path):
        self.manifest = manifest
        self.base_dir = base_dir
        m = manifest
        self.image_globals = _check_array(
            "image_global", open_npy(m.files["image_global"]), (m.image_count, m.d_g))
        self.image_locals = _check_array(
            "image_local", open_npy(m.files["image_local"]), (m.image_count, m.n_l, m.d_l))
        self.description_globals = _check_array(
            "description_global", open_npy(m.files["description_global"]),
            (m.description_count, m.d_g))
        self.description_locals = _check_array(
            "description_local", open_npy(m.files["description_local"]),
            (m.description_count, m.n_l, m.d_l))

    @property
    def image_count(self) -> int:
        return self.manifest.image_count

    @property
    def description_count(self) -> int:
        return self.manifest.description_count

    @property
    def image_ids(self) -> list[str]:
        return self.manifest.image_ids

    @property
    def description_ids(self) -> list[str]:
        return self.manifest.description_ids

    def _row(self, item_id: str, kind: ItemKind) -> int:
        index = (self.manifest.image_index if kind is ItemKind.IMAGE
                 else self.manifest.description_index)
        try:
            return index[item_id]
        except KeyError:
            raise UnknownItemError(f"no {kind.value} with id {item_id!r}") from None

    def get_representation(self, item_id: str, kind: ItemKind) -> Representation:
        """Return the stored representation for one item.

        The arrays are read-only views into the mapped files, so repeated
        calls return identical values at zero copy cost.
        """
        row = self._row(item_id, kind)
        if kind is ItemKind.IMAGE:
            return Representation(self.image_globals[row], self.image_locals[row])
        return Representation(self.description_globals[row], self.description_locals[row])

    def resolve_links(self, description_id: str) -> str:
        """Return the id of the image a description annotates."""
        try:
            return self.manifest.link_table[description_id]
        except KeyError:
            raise UnknownItemError(f"no description with id {description_id!r}") from None

    def image_uri(self, image_id: str) -> str:
        self._row(image_id, ItemKind.IMAGE)
        return self.manifest.image_uris[image_id]

    def description_text(self, description_id: str) -> str:
        self._row(description_id, ItemKind.DESCRIPTION)
        return self.manifest.description_texts[description_id]


def open_store(manifest_path: str | Path) -> ReprStore:
    """Open a store from its manifest.

    Raises ``MissingFileError`` when the manifest or a tensor file is
    absent, ``ShapeMismatchError``/``DtypeMismatchError`` when a file
    disagrees with the manifest.
    """
    manifest_path = Path(manifest_path)
    manifest = load_manifest(manifest_path)
    return ReprStore(manifest, manifest_path.parent)
