"""Similarity scoring and top-k ranking over global/local representations.

The reference scorer fuses a global cosine with an aggregated local score:
``alpha * cos(g_q, g_i) + (1 - alpha) * local(L_q, L_i)`` where the local
term is the mean over query rows of the best cosine against any item row.
The relation-reasoning network this stands in for is external; anything
honouring the ``Scorer`` signature can replace it.

All scores are accumulated in float64 regardless of the stored element
type, and candidates are scored in chunks of contiguous rows so that
memory-mapped stores stream instead of paging entire files in.  Chunking is
pure map-reduce: results are identical to a single-shot computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyCandidateSetError,
    EmptyLocalSetError,
    ZeroVectorError,
)
from .representation import Representation

Scorer = Callable[[Representation, Representation], float]


@dataclass(frozen=True)
class ScorerConfig:
    """Fusion weight and scorer identity.

    ``alpha`` in [0, 1] weights the global cosine; ``1 - alpha`` weights the
    aggregated local score.  At the endpoints the unused side is never
    computed (so global-only ranking never touches local files).
    """

    alpha: float = 0.5
    scorer_id: str = "mean-max-cosine"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class RankedResult:
    item_id: str
    score: float
    rank: int  # 1-based


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two vectors, in [-1, 1].

    Raises ``ZeroVectorError`` when either norm is zero.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"vectors must share one dimension, got {u.shape} and {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for zero-norm vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _normalized_rows(mat: np.ndarray, what: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] == 0:
        raise EmptyLocalSetError(f"{what} local matrix must have at least one row")
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ZeroVectorError(f"{what} local matrix contains a zero row")
    return mat / norms


def local_score(query_locals: np.ndarray, item_locals: np.ndarray) -> float:
    """Aggregate local similarity: mean over query rows of the max cosine
    against any item row.  Result lies in [-1, 1].
    """
    q = _normalized_rows(query_locals, "query")
    i = _normalized_rows(item_locals, "item")
    if q.shape[1] != i.shape[1]:
        raise ValueError(f"local dims differ: {q.shape[1]} vs {i.shape[1]}")
    sims = q @ i.T
    return float(np.clip(sims.max(axis=1).mean(), -1.0, 1.0))


def fused_score(query: Representation, item: Representation,
                cfg: ScorerConfig | None = None) -> float:
    """Fuse global cosine and local score by the configured alpha."""
    cfg = cfg or ScorerConfig()
    if cfg.alpha == 1.0:
        return cosine(query.global_vec, item.global_vec)
    if cfg.alpha == 0.0:
        return local_score(query.local_mat, item.local_mat)
    g = cosine(query.global_vec, item.global_vec)
    l = local_score(query.local_mat, item.local_mat)
    return cfg.alpha * g + (1.0 - cfg.alpha) * l


class CandidateSet:
    """Ids plus stacked representations of the items to rank.

    ``globals_`` has shape (N, d_g); ``locals_`` has shape (N, n_l, d_l)
    and may be a lazy memory map — it is only touched when alpha < 1.
    """

    def __init__(self, ids: Sequence[str], globals_: np.ndarray,
                 locals_: np.ndarray | None):
        self.ids = list(ids)
        self.globals_ = globals_
        self.locals_ = locals_
        if len(self.ids) != globals_.shape[0]:
            raise ValueError("id count does not match globals row count")
        if locals_ is not None and locals_.shape[0] != globals_.shape[0]:
            raise ValueError("locals row count does not match globals")

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_items(cls, items: Iterable[tuple[str, Representation]]) -> "CandidateSet":
        ids, globals_, locals_ = [], [], []
        for item_id, rep in items:
            ids.append(item_id)
            globals_.append(np.asarray(rep.global_vec))
            locals_.append(np.asarray(rep.local_mat))
        if not ids:
            raise EmptyCandidateSetError("no candidates to rank")
        return cls(ids, np.stack(globals_), np.stack(locals_))

    def representation(self, row: int) -> Representation:
        locals_ = self.locals_[row] if self.locals_ is not None else np.empty((0, 0))
        return Representation(self.globals_[row], locals_)


def _global_scores(query_vec: np.ndarray, globals_: np.ndarray) -> np.ndarray:
    q = np.asarray(query_vec, dtype=np.float64)
    qn = np.linalg.norm(q)
    if qn == 0.0:
        raise ZeroVectorError("query global vector has zero norm")
    g = np.asarray(globals_, dtype=np.float64)
    norms = np.linalg.norm(g, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVectorError("candidate global vector has zero norm")
    return np.clip((g @ q) / (norms * qn), -1.0, 1.0)


def _local_scores_chunk(query_rows: np.ndarray, locals_chunk: np.ndarray) -> np.ndarray:
    # query_rows: (n_q, d) unit rows; locals_chunk: (B, n_i, d)
    chunk = np.asarray(locals_chunk, dtype=np.float64)
    norms = np.linalg.norm(chunk, axis=2)
    if np.any(norms == 0.0):
        raise ZeroVectorError("candidate local matrix contains a zero row")
    chunk = chunk / norms[:, :, None]
    # (B, n_i, n_q) similarities: one GEMM per item, so identical items
    # score bitwise-identically regardless of batch position (exact ties
    # are what makes the id tie-break deterministic)
    sims = np.matmul(chunk, query_rows.T)
    return np.clip(sims.max(axis=1).mean(axis=1), -1.0, 1.0)


def _chunk_rows(n_l: int, d_l: int, budget_bytes: int = 64 << 20) -> int:
    per_item = max(1, n_l * d_l * 8)
    return max(1, budget_bytes // per_item)


def score_candidates(query: Representation, candidates: CandidateSet,
                     cfg: ScorerConfig | None = None) -> np.ndarray:
    """Fused score of the query against every candidate, as float64."""
    cfg = cfg or ScorerConfig()
    n = len(candidates)
    if n == 0:
        raise EmptyCandidateSetError("no candidates to rank")

    if cfg.alpha > 0.0:
        global_part = _global_scores(query.global_vec, candidates.globals_)
    else:
        global_part = np.zeros(n)

    if cfg.alpha < 1.0:
        if candidates.locals_ is None:
            raise EmptyLocalSetError("candidate set has no local matrices but alpha < 1")
        q_rows = _normalized_rows(query.local_mat, "query")
        local_part = np.empty(n)
        step = _chunk_rows(*candidates.locals_.shape[1:])
        for start in range(0, n, step):
            stop = min(n, start + step)
            local_part[start:stop] = _local_scores_chunk(
                q_rows, candidates.locals_[start:stop])
    else:
        local_part = np.zeros(n)

    return cfg.alpha * global_part + (1.0 - cfg.alpha) * local_part


def rank(query: Representation, candidates: CandidateSet, k: int,
         cfg: ScorerConfig | None = None) -> list[RankedResult]:
    """Top-k candidates by fused score, descending.

    Ties break by ascending item id, making the output deterministic and
    identical to a full sort followed by truncation.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores = score_candidates(query, candidates, cfg)
    ids = np.asarray(candidates.ids)
    # primary: score descending; secondary: id ascending
    order = np.lexsort((ids, -scores))[:k]
    return [RankedResult(item_id=str(ids[row]), score=float(scores[row]), rank=pos + 1)
            for pos, row in enumerate(order)]
