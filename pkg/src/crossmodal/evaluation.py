"""Retrieval quality, retrieval latency, and description quality metrics.

Recall here is the share of queries whose relevant item appears in the
top-k, reported as a percentage.  Latency is measured per query with the
representation lookup and the scoring pass timed separately, since a
store lookup is index work while scoring walks the candidate tensors.
Description quality is a token-level F1 against reference texts.
"""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import EmptyReferencesError, MissingJudgmentError
from .similarity import CandidateSet, ScorerConfig, rank
from .store.store import ItemKind, ReprStore

DIRECTIONS = ("text_to_image", "image_to_text")
DEFAULT_KS = (1, 5, 10)


def recall_at_k(rankings: Mapping[str, Sequence[str]],
                judgments: Mapping[str, set[str]], k: int) -> float:
    """Percentage of queries with a relevant item in their top ``k``.

    ``rankings`` maps query id to ranked item ids (best first); every
    query must have a nonempty judgment set.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not rankings:
        raise ValueError("recall needs at least one ranked query")
    hits = 0
    for query_id, ranked in rankings.items():
        relevant = judgments.get(query_id)
        if not relevant:
            raise MissingJudgmentError(
                f"query {query_id!r} has no relevance judgments")
        if any(item in relevant for item in ranked[:k]):
            hits += 1
    return 100.0 * hits / len(rankings)


def _store_candidates(store: ReprStore, kind: ItemKind,
                      cfg: ScorerConfig) -> CandidateSet:
    if kind is ItemKind.IMAGE:
        return CandidateSet(store.image_ids, store.image_globals,
                            store.image_locals if cfg.alpha < 1.0 else None)
    return CandidateSet(store.description_ids, store.description_globals,
                        store.description_locals if cfg.alpha < 1.0 else None)


def _benchmark_config(store: ReprStore, cfg: ScorerConfig | None) -> ScorerConfig:
    if cfg is not None:
        return cfg
    # a store without local rows can only be ranked on globals
    if store.manifest.n_l == 0:
        return ScorerConfig(alpha=1.0)
    return ScorerConfig()


def run_benchmark(store: ReprStore, ks: Sequence[int] = DEFAULT_KS,
                  cfg: ScorerConfig | None = None) -> dict[str, dict[int, float]]:
    """Recall in both directions over a store's own link table.

    Text-to-image treats each description as a query whose one relevant
    item is its linked image.  Image-to-text treats each linked image as a
    query whose relevant items are all descriptions pointing at it.
    """
    cfg = _benchmark_config(store, cfg)
    kmax = max(ks)
    image_cands = _store_candidates(store, ItemKind.IMAGE, cfg)
    desc_cands = _store_candidates(store, ItemKind.DESCRIPTION, cfg)

    t2i_rankings, t2i_judgments = {}, {}
    linked: dict[str, set[str]] = {}
    for did in store.description_ids:
        image_id = store.resolve_links(did)
        rep = store.get_representation(did, ItemKind.DESCRIPTION)
        t2i_rankings[did] = [r.item_id for r in rank(rep, image_cands, kmax, cfg)]
        t2i_judgments[did] = {image_id}
        linked.setdefault(image_id, set()).add(did)

    i2t_rankings, i2t_judgments = {}, {}
    for image_id, relevant in linked.items():
        rep = store.get_representation(image_id, ItemKind.IMAGE)
        i2t_rankings[image_id] = [r.item_id
                                  for r in rank(rep, desc_cands, kmax, cfg)]
        i2t_judgments[image_id] = relevant

    return {
        "text_to_image": {k: recall_at_k(t2i_rankings, t2i_judgments, k)
                          for k in ks},
        "image_to_text": {k: recall_at_k(i2t_rankings, i2t_judgments, k)
                          for k in ks},
    }


@dataclass(frozen=True)
class TimingSample:
    query_id: str
    pass_index: int  # 1-based; the warm-up pass 0 is never recorded
    lookup_s: float
    scoring_s: float


@dataclass(frozen=True)
class TimingReport:
    direction: str
    k: int
    candidate_count: int
    samples: list[TimingSample]

    def _stats(self, values: list[float]) -> dict[str, float]:
        return {"mean": sum(values) / len(values),
                "min": min(values), "max": max(values)}

    def summary(self) -> dict:
        lookups = [s.lookup_s for s in self.samples]
        scorings = [s.scoring_s for s in self.samples]
        totals = [a + b for a, b in zip(lookups, scorings)]
        return {
            "direction": self.direction,
            "k": self.k,
            "candidates": self.candidate_count,
            "samples": len(self.samples),
            "lookup_s": self._stats(lookups),
            "scoring_s": self._stats(scorings),
            "total_s": self._stats(totals),
        }


def time_retrieval(store: ReprStore, direction: str,
                   query_ids: Sequence[str] | None = None, k: int = 10,
                   reps: int = 3,
                   cfg: ScorerConfig | None = None) -> TimingReport:
    """Wall-clock retrieval timing over a store.

    Runs ``reps + 1`` passes over the query list and discards the first,
    so page-cache and allocator warm-up never pollute the numbers.  Each
    recorded sample splits the per-query cost into representation lookup
    and scoring-plus-ranking.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    cfg = _benchmark_config(store, cfg)
    if direction == "text_to_image":
        query_kind, cand_kind = ItemKind.DESCRIPTION, ItemKind.IMAGE
        default_queries = store.description_ids
    else:
        query_kind, cand_kind = ItemKind.IMAGE, ItemKind.DESCRIPTION
        default_queries = store.image_ids
    queries = list(query_ids) if query_ids is not None else list(default_queries)
    if not queries:
        raise ValueError("no queries to time")
    candidates = _store_candidates(store, cand_kind, cfg)

    samples: list[TimingSample] = []
    for pass_index in range(reps + 1):
        for query_id in queries:
            t0 = time.perf_counter()
            rep = store.get_representation(query_id, query_kind)
            t1 = time.perf_counter()
            rank(rep, candidates, k, cfg)
            t2 = time.perf_counter()
            if pass_index > 0:
                samples.append(TimingSample(query_id, pass_index,
                                            t1 - t0, t2 - t1))
    return TimingReport(direction, k, len(candidates.ids), samples)


def token_f1(candidate: str, reference: str) -> float:
    """Multiset token overlap F1 between two texts.

    Tokens are lowercased whitespace words.  Two empty texts count as a
    perfect match; one empty side scores zero.
    """
    cand = Counter(candidate.lower().split())
    ref = Counter(reference.lower().split())
    if not cand and not ref:
        return 1.0
    if not cand or not ref:
        return 0.0
    overlap = sum((cand & ref).values())
    if overlap == 0:
        return 0.0
    precision = overlap / sum(cand.values())
    recall = overlap / sum(ref.values())
    return 2.0 * precision * recall / (precision + recall)


def description_match_score(candidate: str, references: Sequence[str]) -> float:
    """Best token F1 of a candidate description against any reference."""
    if not references:
        raise EmptyReferencesError("at least one reference text is required")
    return max(token_f1(candidate, ref) for ref in references)


# --- report rendering -------------------------------------------------------

def format_benchmark_table(results: dict[str, dict[int, float]]) -> str:
    """Fixed-width recall table, one row per direction."""
    ks = sorted(next(iter(results.values())).keys())
    header = ["direction".ljust(14)] + [f"R@{k}".rjust(8) for k in ks]
    lines = ["  ".join(header)]
    for direction in DIRECTIONS:
        if direction not in results:
            continue
        row = [direction.ljust(14)]
        row += [f"{results[direction][k]:8.1f}" for k in ks]
        lines.append("  ".join(row))
    return "\n".join(lines)


def benchmark_to_json(results: dict[str, dict[int, float]]) -> str:
    payload = {direction: {str(k): v for k, v in cells.items()}
               for direction, cells in results.items()}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def format_timing_table(report: TimingReport) -> str:
    s = report.summary()
    lines = [
        f"direction   {s['direction']}",
        f"candidates  {s['candidates']}",
        f"k           {s['k']}",
        f"samples     {s['samples']}",
        "stage        mean_s      min_s      max_s",
    ]
    for stage in ("lookup_s", "scoring_s", "total_s"):
        st = s[stage]
        lines.append(f"{stage.ljust(10)} {st['mean']:9.6f}  {st['min']:9.6f}  "
                     f"{st['max']:9.6f}")
    return "\n".join(lines)
