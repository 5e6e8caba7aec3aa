"""Gallery scoping and ingest policy.

Three gallery modes scope retrieval: ``album`` is a per-account writable
gallery capped at a fixed number of uploads (default 500), ``boon`` is the
shared read-only gallery backed by the precomputed store, and ``google`` is
an ephemeral per-query gallery built from live web-search results.

Ingest serializes through one writer lock per gallery; the in-memory index
update is the commit point, so concurrent readers never observe a partially
written item and the capacity bound holds under racing ingests.
"""

from __future__ import annotations

import enum
import json
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import (
    CapacityExceededError,
    EmptyGalleryError,
    ReadOnlyGalleryError,
    UnknownItemError,
)
from ..representation import Representation
from ..similarity import CandidateSet
from .store import ItemKind, ReprStore

DEFAULT_ALBUM_CAPACITY = 500


class GalleryMode(enum.Enum):
    ALBUM = "album"
    BOON = "boon"
    GOOGLE = "google"


@dataclass
class GalleryItem:
    item_id: str
    payload_uri: str
    representation: Representation
    links: dict[str, str] | None = None


class Gallery:
    """Common gallery surface: mode, ownership, counts, candidates."""

    mode: GalleryMode
    owner: str | None = None
    capacity: int | None = None

    @property
    def item_count(self) -> int:
        raise NotImplementedError

    def ingest(self, payload_uri: str, representation: Representation,
               links: dict[str, str] | None = None) -> str:
        raise ReadOnlyGalleryError(f"{self.mode.value} gallery does not accept uploads")

    def image_candidates(self) -> CandidateSet:
        raise NotImplementedError


class StoreGallery(Gallery):
    """Read-only gallery over a precomputed representation store."""

    mode = GalleryMode.BOON

    def __init__(self, store: ReprStore):
        self.store = store

    @property
    def item_count(self) -> int:
        return self.store.image_count

    def image_candidates(self) -> CandidateSet:
        if self.store.image_count == 0:
            raise EmptyGalleryError("store gallery holds no images")
        return CandidateSet(self.store.image_ids, self.store.image_globals,
                            self.store.image_locals)

    def description_candidates(self) -> CandidateSet:
        if self.store.description_count == 0:
            raise EmptyGalleryError("store gallery holds no descriptions")
        return CandidateSet(self.store.description_ids, self.store.description_globals,
                            self.store.description_locals)

    def payload_uri(self, item_id: str) -> str:
        return self.store.image_uri(item_id)


class AlbumGallery(Gallery):
    """Per-account writable gallery with a hard capacity.

    Representations are held in memory and, when ``persist_dir`` is given,
    flushed to tensor files plus a JSON item index after every ingest via
    atomic rename.
    """

    mode = GalleryMode.ALBUM

    def __init__(self, owner: str | None = None,
                 capacity: int = DEFAULT_ALBUM_CAPACITY,
                 persist_dir: str | Path | None = None):
        self.owner = owner
        self.capacity = capacity
        self.persist_dir = Path(persist_dir) if persist_dir else None
        self._items: dict[str, GalleryItem] = {}
        self._order: list[str] = []
        self._lock = threading.Lock()
        self._next_seq = 0
        self._dims: tuple[int, int, int] | None = None  # (d_g, n_l, d_l)
        if self.persist_dir is not None:
            self.persist_dir.mkdir(parents=True, exist_ok=True)
            self._load_persisted()

    @property
    def item_count(self) -> int:
        return len(self._order)

    def ingest(self, payload_uri: str, representation: Representation,
               links: dict[str, str] | None = None) -> str:
        with self._lock:
            if self.item_count >= self.capacity:
                raise CapacityExceededError(
                    f"album gallery is full ({self.capacity} items)")
            if self._dims is None:
                representation.validate()
                dims = (representation.d_g, representation.n_l, representation.d_l)
            else:
                d_g, n_l, d_l = self._dims
                representation.validate(d_g=d_g, n_l=n_l, d_l=d_l)
                dims = self._dims
            item_id = f"a{self._next_seq:06d}"
            item = GalleryItem(item_id, payload_uri, representation, links)
            if self.persist_dir is not None:
                self._flush(self._order + [item_id], {**self._items, item_id: item})
            # commit point: index update under the lock
            self._dims = dims
            self._items[item_id] = item
            self._order.append(item_id)
            self._next_seq += 1
            return item_id

    def get(self, item_id: str) -> GalleryItem:
        try:
            return self._items[item_id]
        except KeyError:
            raise UnknownItemError(f"no album item with id {item_id!r}") from None

    def item_ids(self) -> list[str]:
        with self._lock:
            return list(self._order)

    def payload_uri(self, item_id: str) -> str:
        return self.get(item_id).payload_uri

    def image_candidates(self) -> CandidateSet:
        with self._lock:
            if not self._order:
                raise EmptyGalleryError("album gallery is empty")
            items = [(i, self._items[i].representation) for i in self._order]
        return CandidateSet.from_items(items)

    # --- persistence --------------------------------------------------------

    def _flush(self, order: list[str], items: dict[str, GalleryItem]) -> None:
        globals_ = np.stack([items[i].representation.global_vec for i in order])
        locals_ = np.stack([items[i].representation.local_mat for i in order])
        index = {
            "next_seq": self._next_seq + 1,
            "items": [{"id": i, "uri": items[i].payload_uri} for i in order],
        }
        for name, arr in (("album_global.npy", globals_), ("album_local.npy", locals_)):
            tmp = self.persist_dir / (name + ".tmp")
            with open(tmp, "wb") as fh:
                np.save(fh, arr)
            tmp.replace(self.persist_dir / name)
        tmp = self.persist_dir / "items.json.tmp"
        tmp.write_text(json.dumps(index), "utf-8")
        tmp.replace(self.persist_dir / "items.json")

    def _load_persisted(self) -> None:
        index_path = self.persist_dir / "items.json"
        if not index_path.is_file():
            return
        index = json.loads(index_path.read_text("utf-8"))
        globals_ = np.load(self.persist_dir / "album_global.npy")
        locals_ = np.load(self.persist_dir / "album_local.npy")
        for row, entry in enumerate(index["items"]):
            rep = Representation(globals_[row], locals_[row])
            self._items[entry["id"]] = GalleryItem(entry["id"], entry["uri"], rep)
            self._order.append(entry["id"])
        if self._order:
            first = self._items[self._order[0]].representation
            self._dims = (first.d_g, first.n_l, first.d_l)
        self._next_seq = int(index.get("next_seq", len(self._order)))


class EphemeralGallery(Gallery):
    """Per-query gallery of encoded web-search results; never persisted."""

    mode = GalleryMode.GOOGLE

    def __init__(self, items: list[GalleryItem] | None = None):
        self._items = list(items or [])

    @property
    def item_count(self) -> int:
        return len(self._items)

    def add(self, item: GalleryItem) -> None:
        self._items.append(item)

    def image_candidates(self) -> CandidateSet:
        if not self._items:
            raise EmptyGalleryError("no web results to rank")
        return CandidateSet.from_items(
            (item.item_id, item.representation) for item in self._items)


def ingest_item(gallery: Gallery, payload_uri: str, representation: Representation,
                links: dict[str, str] | None = None) -> str:
    """Add one item to a writable gallery, returning its fresh id.

    Raises ``ReadOnlyGalleryError`` for the shared gallery,
    ``CapacityExceededError`` at the album cap, and ``DimMismatchError``
    when the representation disagrees with the gallery's dims.
    """
    return gallery.ingest(payload_uri, representation, links)
