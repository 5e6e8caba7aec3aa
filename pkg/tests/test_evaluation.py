"""Metric tests: recall, benchmark runs, latency harness, token F1.

Oracles:
- the four-query recall fixture (relevant ranks 1, 2, 6, 11) has
  hand-counted values 25.0 / 50.0 / 75.0 at k = 1 / 5 / 10.
- recall over random fixtures is recounted by a naive double loop
  below.
- token-F1 values come from counting overlaps by hand: 3-token texts
  differing in one token give 2/3.
- planted stores make the expected recall exact by construction: shared
  representations pin it at 100, axis-opposed ones at 0.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossmodal.errors import EmptyReferencesError, MissingJudgmentError
from crossmodal.evaluation import (
    benchmark_to_json,
    description_match_score,
    format_benchmark_table,
    format_timing_table,
    recall_at_k,
    run_benchmark,
    time_retrieval,
    token_f1,
)
from crossmodal.fixtures import adversarial_store, make_store, planted_store
from crossmodal.store.store import open_store


def fixture_rankings():
    """Four queries whose single relevant item sits at rank 1, 2, 6, 11."""
    rankings, judgments = {}, {}
    for q, position in enumerate([1, 2, 6, 11], start=1):
        qid = f"q{q}"
        ranked = [f"filler{q}_{n}" for n in range(1, 12)]
        ranked[position - 1] = f"rel{q}"
        rankings[qid] = ranked
        judgments[qid] = {f"rel{q}"}
    return rankings, judgments


def naive_recall(rankings, judgments, k):
    hit = 0
    for qid in rankings:
        found = False
        for item in list(rankings[qid])[:k]:
            if item in judgments[qid]:
                found = True
        if found:
            hit += 1
    return 100.0 * hit / len(rankings)


class TestRecallAtK:

    @pytest.mark.parametrize("k,expected", [(1, 25.0), (5, 50.0), (10, 75.0)])
    def test_hand_counted_fixture(self, k, expected):
        rankings, judgments = fixture_rankings()
        assert recall_at_k(rankings, judgments, k) == expected

    def test_matches_naive_recount_on_random_fixtures(self):
        rng = np.random.default_rng(11)
        for trial in range(100):
            n_items = int(rng.integers(3, 30))
            items = [f"t{trial}_i{n}" for n in range(n_items)]
            rankings, judgments = {}, {}
            for q in range(int(rng.integers(1, 12))):
                qid = f"t{trial}_q{q}"
                order = list(rng.permutation(items))
                depth = int(rng.integers(1, n_items + 1))
                rankings[qid] = order[:depth]
                n_rel = int(rng.integers(1, n_items + 1))
                judgments[qid] = set(rng.choice(items, size=n_rel, replace=False))
            for k in (1, 5, 10):
                assert recall_at_k(rankings, judgments, k) == \
                    naive_recall(rankings, judgments, k)

    def test_missing_judgment_rejected(self):
        rankings, judgments = fixture_rankings()
        del judgments["q2"]
        with pytest.raises(MissingJudgmentError):
            recall_at_k(rankings, judgments, 5)

    def test_empty_judgment_set_rejected(self):
        rankings, judgments = fixture_rankings()
        judgments["q3"] = set()
        with pytest.raises(MissingJudgmentError):
            recall_at_k(rankings, judgments, 5)

    def test_bad_k_and_no_queries(self):
        rankings, judgments = fixture_rankings()
        with pytest.raises(ValueError):
            recall_at_k(rankings, judgments, 0)
        with pytest.raises(ValueError):
            recall_at_k({}, {}, 5)


class TestRunBenchmark:

    def test_planted_optimum_is_all_hundred(self, tmp_path):
        store = open_store(planted_store(tmp_path, pairs=30, seed=4))
        results = run_benchmark(store)
        for direction in ("text_to_image", "image_to_text"):
            for k in (1, 5, 10):
                assert results[direction][k] == 100.0

    def test_adversarial_store_scores_zero(self, tmp_path):
        store = open_store(adversarial_store(tmp_path, pairs=20))
        results = run_benchmark(store)
        for direction in ("text_to_image", "image_to_text"):
            for k in (1, 5, 10):
                assert results[direction][k] == 0.0

    def test_random_store_recall_is_bounded_and_monotone(self, tmp_path):
        store = open_store(make_store(tmp_path, images=12, descriptions=18,
                                      d_g=16, d_l=8, n_l=3, seed=2))
        results = run_benchmark(store)
        for direction in ("text_to_image", "image_to_text"):
            cells = results[direction]
            assert 0.0 <= cells[1] <= cells[5] <= cells[10] <= 100.0

    def test_global_only_store_runs_on_globals(self, tmp_path):
        store = open_store(make_store(tmp_path, images=10, descriptions=14,
                                      d_g=16, seed=3, write_locals=False))
        results = run_benchmark(store)
        assert set(results) == {"text_to_image", "image_to_text"}
        assert all(0.0 <= v <= 100.0
                   for cells in results.values() for v in cells.values())

    def test_noisy_planted_store_stays_high(self, tmp_path):
        store = open_store(planted_store(tmp_path, pairs=40, seed=9, noise=0.05))
        results = run_benchmark(store)
        assert results["text_to_image"][10] >= results["text_to_image"][1]
        assert results["text_to_image"][10] >= 90.0


class TestTimeRetrieval:

    def test_sample_count_and_stage_split(self, tmp_path):
        store = open_store(make_store(tmp_path, images=6, descriptions=9,
                                      d_g=8, d_l=4, n_l=2, seed=5))
        report = time_retrieval(store, "text_to_image", k=3, reps=2)
        assert len(report.samples) == store.description_count * 2
        assert {s.pass_index for s in report.samples} == {1, 2}
        assert all(s.lookup_s >= 0 and s.scoring_s >= 0 for s in report.samples)
        summary = report.summary()
        assert summary["samples"] == len(report.samples)
        for stage in ("lookup_s", "scoring_s", "total_s"):
            st_ = summary[stage]
            assert st_["min"] <= st_["mean"] <= st_["max"]

    def test_direction_and_reps_validation(self, tmp_path):
        store = open_store(make_store(tmp_path, images=3, descriptions=3,
                                      d_g=8, d_l=4, n_l=2))
        with pytest.raises(ValueError):
            time_retrieval(store, "sideways")
        with pytest.raises(ValueError):
            time_retrieval(store, "text_to_image", reps=0)
        with pytest.raises(ValueError):
            time_retrieval(store, "text_to_image", query_ids=[])

    def test_image_to_text_times_image_queries(self, tmp_path):
        store = open_store(make_store(tmp_path, images=4, descriptions=6,
                                      d_g=8, d_l=4, n_l=2))
        report = time_retrieval(store, "image_to_text",
                                query_ids=["i0", "i2"], k=2, reps=1)
        assert len(report.samples) == 2
        assert report.candidate_count == store.description_count


class TestTokenF1:

    def test_identity_is_one(self):
        text = "a man rides a horse on the beach"
        assert token_f1(text, text) == 1.0
        assert description_match_score(text, [text]) == 1.0

    def test_one_token_of_three_differs(self):
        assert abs(token_f1("a b c", "a b d") - 2.0 / 3.0) < 1e-9

    def test_disjoint_texts_score_zero(self):
        assert token_f1("a b c", "x y z") == 0.0

    def test_empty_sides(self):
        assert token_f1("", "") == 1.0
        assert token_f1("", "a b") == 0.0
        assert token_f1("a b", "") == 0.0

    def test_multiset_overlap_counts_duplicates(self):
        # overlap of {a:2, b:1} and {a:1, b:2} is 2; both sides hold 3
        assert abs(token_f1("a a b", "a b b") - 2.0 / 3.0) < 1e-9

    def test_case_insensitive(self):
        assert token_f1("A Horse", "a horse") == 1.0

    def test_best_reference_wins(self):
        score = description_match_score("a b c", ["x y z", "a b d", "a b c"])
        assert score == 1.0

    def test_empty_references_rejected(self):
        with pytest.raises(EmptyReferencesError):
            description_match_score("a b c", [])

    @given(st.lists(st.sampled_from("abcde"), max_size=8),
           st.lists(st.sampled_from("abcde"), max_size=8))
    @settings(max_examples=150, deadline=None)
    def test_symmetric_and_bounded(self, left, right):
        a, b = " ".join(left), " ".join(right)
        score = token_f1(a, b)
        assert 0.0 <= score <= 1.0
        assert score == token_f1(b, a)


class TestReportRendering:

    def test_benchmark_table_lists_directions_and_cutoffs(self, tmp_path):
        store = open_store(planted_store(tmp_path, pairs=5))
        results = run_benchmark(store)
        table = format_benchmark_table(results)
        assert "text_to_image" in table
        assert "image_to_text" in table
        assert "R@10" in table
        assert "100.0" in table

    def test_benchmark_json_round_trips(self, tmp_path):
        store = open_store(planted_store(tmp_path, pairs=5))
        results = run_benchmark(store)
        payload = json.loads(benchmark_to_json(results))
        assert payload["text_to_image"]["1"] == 100.0

    def test_timing_table_mentions_stages(self, tmp_path):
        store = open_store(make_store(tmp_path, images=3, descriptions=3,
                                      d_g=8, d_l=4, n_l=2))
        table = format_timing_table(
            time_retrieval(store, "text_to_image", k=2, reps=1))
        assert "lookup_s" in table
        assert "scoring_s" in table
        assert "total_s" in table
