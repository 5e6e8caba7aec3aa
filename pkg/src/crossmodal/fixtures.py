"""Synthetic store generation for tests, benchmarks, and demos.

Stores are written through the ecosystem's reference NPY writer (np.save),
keeping the engine's own parser an independent reader of them.  Everything
is deterministic per seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .store.manifest import DEFAULT_FILES


def _unit_rows(rng: np.random.Generator, shape: tuple[int, ...],
               dtype: str) -> np.ndarray:
    arr = rng.standard_normal(shape)
    norms = np.linalg.norm(arr, axis=-1, keepdims=True)
    return (arr / norms).astype(dtype)


def make_store(out_dir: str | Path, *, images: int, descriptions: int,
               d_g: int = 64, d_l: int = 64, n_l: int = 16,
               dtype: str = "float32", seed: int = 0,
               write_locals: bool = True) -> Path:
    """Write a synthetic store and return the manifest path.

    Image ids are ``i0..``, description ids ``d0..``; description ``dN``
    links to image ``i(N % images)``.  Global vectors and local rows are
    unit-norm gaussian directions.  With ``write_locals=False`` the local
    files hold zero-row arrays (global-only benchmark stores) while keeping
    the four-file layout intact.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    eff_n_l = n_l if write_locals else 0
    arrays = {
        "image_global": _unit_rows(rng, (images, d_g), dtype),
        "image_local": _unit_rows(rng, (images, eff_n_l, d_l), dtype)
        if eff_n_l else np.zeros((images, 0, d_l), dtype=dtype),
        "description_global": _unit_rows(rng, (descriptions, d_g), dtype),
        "description_local": _unit_rows(rng, (descriptions, eff_n_l, d_l), dtype)
        if eff_n_l else np.zeros((descriptions, 0, d_l), dtype=dtype),
    }
    for role, arr in arrays.items():
        np.save(out_dir / DEFAULT_FILES[role], arr)

    manifest = {
        "dims": {"d_g": d_g, "d_l": d_l, "n_l": eff_n_l},
        "files": dict(DEFAULT_FILES),
        "images": [{"id": f"i{n}", "uri": f"images/i{n}.jpg"} for n in range(images)],
        "descriptions": [
            {"id": f"d{n}", "text": f"synthetic description {n}",
             "image_id": f"i{n % images}"}
            for n in range(descriptions)
        ],
    }
    if images == 0:
        manifest["descriptions"] = []
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), "utf-8")
    return path


def planted_store(out_dir: str | Path, *, pairs: int, d_g: int = 32,
                  d_l: int = 16, n_l: int = 4, seed: int = 0,
                  noise: float = 0.0) -> Path:
    """Store where description ``dN`` shares image ``iN``'s representation.

    With zero noise each query's linked item is its unique perfect match,
    which pins every recall cell at 100.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    img_g = _unit_rows(rng, (pairs, d_g), "float32")
    img_l = _unit_rows(rng, (pairs, n_l, d_l), "float32")
    if noise:
        de_g = img_g + noise * rng.standard_normal(img_g.shape).astype("float32")
        de_l = img_l + noise * rng.standard_normal(img_l.shape).astype("float32")
    else:
        de_g, de_l = img_g.copy(), img_l.copy()

    np.save(out_dir / DEFAULT_FILES["image_global"], img_g)
    np.save(out_dir / DEFAULT_FILES["image_local"], img_l)
    np.save(out_dir / DEFAULT_FILES["description_global"], de_g)
    np.save(out_dir / DEFAULT_FILES["description_local"], de_l)

    manifest = {
        "dims": {"d_g": d_g, "d_l": d_l, "n_l": n_l},
        "files": dict(DEFAULT_FILES),
        "images": [{"id": f"i{n}", "uri": f"images/i{n}.jpg"} for n in range(pairs)],
        "descriptions": [
            {"id": f"d{n}", "text": f"planted description {n}", "image_id": f"i{n}"}
            for n in range(pairs)
        ],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), "utf-8")
    return path


def adversarial_store(out_dir: str | Path, *, pairs: int) -> Path:
    """Store where every description's linked image is its worst match.

    Image ``iN`` sits on basis axis ``e_N`` (globals and its one local
    row); description ``dN`` sits on ``-e_N``.  The linked image then
    scores exactly -1 while every other image scores exactly 0, so the
    relevant item lands dead last for every query and recall is 0 at any
    cutoff below ``pairs``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    eye = np.eye(pairs, dtype="float32")
    np.save(out_dir / DEFAULT_FILES["image_global"], eye)
    np.save(out_dir / DEFAULT_FILES["image_local"], eye[:, None, :])
    np.save(out_dir / DEFAULT_FILES["description_global"], -eye)
    np.save(out_dir / DEFAULT_FILES["description_local"], -eye[:, None, :])

    manifest = {
        "dims": {"d_g": pairs, "d_l": pairs, "n_l": 1},
        "files": dict(DEFAULT_FILES),
        "images": [{"id": f"i{n}", "uri": f"images/i{n}.jpg"} for n in range(pairs)],
        "descriptions": [
            {"id": f"d{n}", "text": f"mismatched description {n}", "image_id": f"i{n}"}
            for n in range(pairs)
        ],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), "utf-8")
    return path
