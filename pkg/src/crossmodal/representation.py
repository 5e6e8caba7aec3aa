"""Shared representation type: one item's global vector plus local matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatchError


@dataclass(frozen=True)
class Representation:
    """Embedding of one image or description in the shared latent space.

    ``global_vec`` has shape ``(d_g,)``; ``local_mat`` has shape
    ``(n_l, d_l)``, one row per image region or text token.  Arrays may be
    views into memory-mapped store files and must be treated as read-only.
    """

    global_vec: np.ndarray
    local_mat: np.ndarray

    @property
    def d_g(self) -> int:
        return int(self.global_vec.shape[0])

    @property
    def n_l(self) -> int:
        return int(self.local_mat.shape[0])

    @property
    def d_l(self) -> int:
        return int(self.local_mat.shape[1])

    def validate(self, d_g: int | None = None, d_l: int | None = None,
                 n_l: int | None = None) -> "Representation":
        """Check dimensionality and finiteness, returning self.

        Raises ``DimMismatchError`` when shapes disagree with the expected
        dims or any entry is NaN/Inf.
        """
        if self.global_vec.ndim != 1 or self.local_mat.ndim != 2:
            raise DimMismatchError(
                f"expected 1-D global and 2-D locals, got shapes "
                f"{self.global_vec.shape} and {self.local_mat.shape}")
        if d_g is not None and self.d_g != d_g:
            raise DimMismatchError(f"global dim {self.d_g} != expected {d_g}")
        if n_l is not None and self.n_l != n_l:
            raise DimMismatchError(f"local count {self.n_l} != expected {n_l}")
        if d_l is not None and self.d_l != d_l:
            raise DimMismatchError(f"local dim {self.d_l} != expected {d_l}")
        if not (np.isfinite(self.global_vec).all() and np.isfinite(self.local_mat).all()):
            raise DimMismatchError("representation contains NaN or Inf entries")
        return self
