"""Store manifest: the sidecar document that maps item ids onto tensor rows.

The tensor files hold raw arrays only, so a JSON manifest carries everything
else: latent dims, the four file paths, item-id order (list position is the
row index, hence indices are dense ``[0, count)``), per-item payloads (image
URI / description text), and the description-to-image link table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import MalformedHeaderError, MissingFileError

TENSOR_ROLES = ("image_global", "image_local", "description_global", "description_local")

DEFAULT_FILES = {
    "image_global": "imGloRp.npy",
    "image_local": "imLocRp.npy",
    "description_global": "deGloRp.npy",
    "description_local": "deLocRp.npy",
}


@dataclass
class StoreManifest:
    d_g: int
    d_l: int
    n_l: int
    files: dict[str, Path]
    image_ids: list[str]
    description_ids: list[str]
    image_uris: dict[str, str]
    description_texts: dict[str, str]
    link_table: dict[str, str]  # description id -> image id
    image_index: dict[str, int] = field(init=False)
    description_index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.image_index = {item: row for row, item in enumerate(self.image_ids)}
        self.description_index = {item: row for row, item in enumerate(self.description_ids)}

    @property
    def image_count(self) -> int:
        return len(self.image_ids)

    @property
    def description_count(self) -> int:
        return len(self.description_ids)


class ManifestError(MalformedHeaderError):
    """Manifest file unreadable or internally inconsistent."""

    machine_code = "malformed_manifest"


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ManifestError(message)


def load_manifest(path: str | Path) -> StoreManifest:
    """Load and validate a store manifest.

    Checks performed here are purely structural; shape agreement with the
    tensor files is checked at store-open time.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ManifestError(f"manifest does not parse as JSON: {exc}") from exc

    _require(isinstance(raw, dict), "manifest root must be an object")
    dims = raw.get("dims")
    _require(isinstance(dims, dict), "manifest missing dims object")
    for key in ("d_g", "d_l"):
        _require(isinstance(dims.get(key), int) and dims[key] > 0,
                 f"dims.{key} must be a positive integer")
    # n_l == 0 marks a global-only store (local files hold zero-row arrays)
    _require(isinstance(dims.get("n_l"), int) and dims["n_l"] >= 0,
             "dims.n_l must be a non-negative integer")

    files_raw = raw.get("files", {})
    _require(isinstance(files_raw, dict), "manifest files must be an object")
    files = {}
    for role in TENSOR_ROLES:
        rel = files_raw.get(role, DEFAULT_FILES[role])
        _require(isinstance(rel, str) and rel, f"files.{role} must be a path")
        files[role] = (path.parent / rel).resolve()

    images = raw.get("images")
    descriptions = raw.get("descriptions")
    _require(isinstance(images, list), "manifest missing images list")
    _require(isinstance(descriptions, list), "manifest missing descriptions list")

    image_ids, image_uris = [], {}
    for entry in images:
        _require(isinstance(entry, dict) and isinstance(entry.get("id"), str),
                 f"bad image entry: {entry!r}")
        item_id = entry["id"]
        _require(item_id not in image_uris, f"duplicate image id {item_id!r}")
        image_ids.append(item_id)
        image_uris[item_id] = str(entry.get("uri", ""))

    description_ids, description_texts, link_table = [], {}, {}
    for entry in descriptions:
        _require(isinstance(entry, dict) and isinstance(entry.get("id"), str),
                 f"bad description entry: {entry!r}")
        item_id = entry["id"]
        _require(item_id not in description_texts, f"duplicate description id {item_id!r}")
        description_ids.append(item_id)
        description_texts[item_id] = str(entry.get("text", ""))
        linked = entry.get("image_id")
        _require(isinstance(linked, str) and linked,
                 f"description {item_id!r} has no image_id link")
        link_table[item_id] = linked

    # referential integrity: every link resolves to a manifest image
    known = set(image_ids)
    for desc_id, image_id in link_table.items():
        _require(image_id in known,
                 f"description {desc_id!r} links to unknown image {image_id!r}")

    return StoreManifest(
        d_g=dims["d_g"],
        d_l=dims["d_l"],
        n_l=dims["n_l"],
        files=files,
        image_ids=image_ids,
        description_ids=description_ids,
        image_uris=image_uris,
        description_texts=description_texts,
        link_table=link_table,
    )


def write_manifest(path: str | Path, manifest_dict: dict) -> Path:
    """Serialize a manifest dict to disk (fixture generation helper)."""
    path = Path(path)
    path.write_text(json.dumps(manifest_dict, indent=2), "utf-8")
    return path
