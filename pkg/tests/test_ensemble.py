"""Vote combination, threshold behavior, shortlist ranking, decisions file."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paracode.classifiers import ALL_KINDS, LearnerKind, ModelBundle, fit, TrainingSet
from paracode.corpus import Paragraph
from paracode.embedding import HashingProvider, embed_corpus
from paracode.ensemble import (
    VoteRecord,
    classify_corpus,
    combine,
    make_shortlist,
    mean_confidence,
    read_decisions,
    write_decisions,
)
from paracode.errors import (
    IncompleteBundle,
    InconsistentInputs,
    MissingVector,
    ThresholdOutOfRange,
)

KIND_NAMES = [k.value for k in ALL_KINDS]


def vote_record(bits, para_id="p#0000", dimension="pc", scores=None):
    votes = dict(zip(KIND_NAMES, bits))
    if scores is None:
        scores = {k: float(v) for k, v in votes.items()}
    return VoteRecord(para_id=para_id, dimension=dimension, votes=votes, scores=scores)


class TestCombine:
    def test_two_votes_meet_threshold_two(self):
        decision = combine(vote_record([1, 1, 0, 0, 0]), threshold=2)
        assert decision.decision == 1
        assert decision.positive_votes == 2

    def test_no_votes_never_flagged(self):
        for t in range(1, 6):
            assert combine(vote_record([0, 0, 0, 0, 0]), threshold=t).decision == 0

    def test_two_votes_fail_threshold_three(self):
        assert combine(vote_record([1, 1, 0, 0, 0]), threshold=3).decision == 0

    def test_threshold_out_of_range(self):
        with pytest.raises(ThresholdOutOfRange):
            combine(vote_record([1, 0, 0, 0, 0]), threshold=0)
        with pytest.raises(ThresholdOutOfRange):
            combine(vote_record([1, 0, 0, 0, 0]), threshold=6)

    def test_exhaustive_oracle_all_patterns_and_thresholds(self):
        # brute force over all 2^5 vote patterns x thresholds 1..5
        for bits in itertools.product((0, 1), repeat=5):
            for threshold in range(1, 6):
                decision = combine(vote_record(list(bits)), threshold)
                assert decision.positive_votes == sum(bits)
                assert decision.decision == (1 if sum(bits) >= threshold else 0)
                assert decision.threshold_used == threshold

    def test_vote_record_requires_five_kinds(self):
        with pytest.raises(ValueError):
            VoteRecord("p", "pc", {"logreg": 1}, {"logreg": 0.9})

    @settings(max_examples=300)
    @given(st.lists(st.integers(0, 1), min_size=5, max_size=5), st.integers(1, 4))
    def test_threshold_monotonicity(self, bits, threshold):
        lower = combine(vote_record(bits), threshold)
        higher = combine(vote_record(bits), threshold + 1)
        if higher.decision == 1:
            assert lower.decision == 1


def build_fixture(n=12, seed=5):
    """Tiny trained bundle + embedded paragraphs for classify tests."""
    rng = np.random.default_rng(seed)
    pos_words = ["people", "nation", "citizens", "community", "society"]
    neg_words = ["budget", "roads", "schedule", "infrastructure", "committee"]
    paragraphs = []
    labels = []
    for i in range(n):
        positive = i % 3 == 0
        words = rng.choice(pos_words if positive else neg_words, size=6)
        paragraphs.append(
            Paragraph(para_id=f"d#{i:04d}", doc_id="d", index=i, text=" ".join(words))
        )
        labels.append(1 if positive else 0)
    provider = HashingProvider(n_features=64, seed=9)
    cache = embed_corpus(paragraphs, provider)
    X = cache.matrix([p.para_id for p in paragraphs])
    y = np.array(labels)
    bundle = ModelBundle(seed=0)
    for dim_name in ("pc", "ae"):
        data = TrainingSet(X, y, dim_name)
        for kind in ALL_KINDS:
            bundle.put(dim_name, fit(kind, data, seed=0))
    return paragraphs, bundle, cache


class TestClassifyCorpus:
    def test_empty_corpus(self):
        _, bundle, cache = build_fixture()
        decisions, records = classify_corpus([], bundle, cache)
        assert decisions == [] and records == []

    def test_one_decision_per_paragraph_and_dimension(self):
        paragraphs, bundle, cache = build_fixture()
        decisions, records = classify_corpus(paragraphs, bundle, cache)
        assert len(decisions) == len(paragraphs) * 2
        keys = {(d.para_id, d.dimension) for d in decisions}
        assert len(keys) == len(decisions)

    def test_unanimous_positive_flagged_at_any_threshold(self):
        paragraphs, bundle, cache = build_fixture()
        unanimous = None
        for t in range(1, 6):
            decisions, records = classify_corpus(paragraphs, bundle, cache, threshold=t)
            by_votes = {
                (r.para_id, r.dimension): sum(r.votes.values()) for r in records
            }
            if unanimous is None:
                unanimous = [k for k, v in by_votes.items() if v == 5]
                assert unanimous, "fixture should contain a unanimous paragraph"
            flagged = {(d.para_id, d.dimension) for d in decisions if d.decision == 1}
            for key in unanimous:
                assert key in flagged

    def test_threshold_three_subset_of_two(self):
        paragraphs, bundle, cache = build_fixture()
        d2, _ = classify_corpus(paragraphs, bundle, cache, threshold=2)
        d3, _ = classify_corpus(paragraphs, bundle, cache, threshold=3)
        pos2 = {(d.para_id, d.dimension) for d in d2 if d.decision == 1}
        pos3 = {(d.para_id, d.dimension) for d in d3 if d.decision == 1}
        assert pos3 <= pos2

    def test_incomplete_bundle_rejected(self):
        paragraphs, bundle, cache = build_fixture()
        del bundle.models[("ae", LearnerKind.mlp)]
        with pytest.raises(IncompleteBundle):
            classify_corpus(paragraphs, bundle, cache)

    def test_missing_vector_rejected(self):
        paragraphs, bundle, cache = build_fixture()
        extra = Paragraph(para_id="x#0000", doc_id="x", index=0, text="unseen text")
        with pytest.raises(MissingVector):
            classify_corpus(paragraphs + [extra], bundle, cache)

    def test_dimension_independence(self):
        paragraphs, bundle, cache = build_fixture()
        before, _ = classify_corpus(paragraphs, bundle, cache)
        ae_before = [d for d in before if d.dimension == "ae"]

        # swap in a different pc model; ae decisions must not move
        X = cache.matrix([p.para_id for p in paragraphs])
        y = (np.arange(len(paragraphs)) % 2).astype(int)
        bundle.put("pc", fit("gnb", TrainingSet(X, y, "pc"), seed=123))
        after, _ = classify_corpus(paragraphs, bundle, cache)
        ae_after = [d for d in after if d.dimension == "ae"]
        assert ae_before == ae_after


class TestShortlist:
    def test_empty_when_nothing_flagged(self):
        votes = [vote_record([0, 0, 0, 0, 0], f"p#{i:04d}") for i in range(3)]
        decisions = [combine(v, 2) for v in votes]
        assert make_shortlist(decisions, votes) == []

    def test_orders_by_vote_count(self):
        v_hi = vote_record([1, 1, 1, 1, 1], "p#0002")
        v_lo = vote_record([1, 1, 1, 0, 0], "p#0001")
        decisions = [combine(v_lo, 2), combine(v_hi, 2)]
        entries = make_shortlist(decisions, [v_lo, v_hi])
        assert [e.para_id for e in entries] == ["p#0002", "p#0001"]
        assert entries[0].positive_votes == 5

    def test_ties_order_by_para_id(self):
        bits = [1, 1, 0, 0, 0]
        scores = {k: float(v) for k, v in zip(KIND_NAMES, bits)}
        v_b = vote_record(bits, "p#0002", scores=scores)
        v_a = vote_record(bits, "p#0001", scores=scores)
        entries = make_shortlist([combine(v_b, 2), combine(v_a, 2)], [v_b, v_a])
        assert [e.para_id for e in entries] == ["p#0001", "p#0002"]

    def test_contains_exactly_flagged(self):
        votes = [
            vote_record([1, 1, 1, 0, 0], "p#0000"),
            vote_record([1, 0, 0, 0, 0], "p#0001"),
        ]
        decisions = [combine(v, 2) for v in votes]
        entries = make_shortlist(decisions, votes)
        assert [e.para_id for e in entries] == ["p#0000"]

    def test_inconsistent_inputs(self):
        votes = [vote_record([1, 1, 0, 0, 0], "p#0000")]
        decisions = [combine(vote_record([1, 1, 0, 0, 0], "p#0001"), 2)]
        with pytest.raises(InconsistentInputs):
            make_shortlist(decisions, votes)

    def test_mean_score_squashes_svm_margin(self):
        scores = {"logreg": 0.8, "gnb": 0.6, "svm": 2.0, "mlp": 0.7, "knn": 0.6}
        record = vote_record([1, 1, 1, 1, 1], scores=scores)
        expected = (0.8 + 0.6 + 1 / (1 + math.exp(-2.0)) + 0.7 + 0.6) / 5
        assert mean_confidence(record) == pytest.approx(expected, rel=1e-12)
        assert 0.0 <= mean_confidence(record) <= 1.0


class TestDecisionsFile:
    def test_round_trip(self, tmp_path):
        paragraphs, bundle, cache = build_fixture()
        decisions, records = classify_corpus(paragraphs, bundle, cache)
        path = tmp_path / "decisions.jsonl"
        write_decisions(decisions, records, path)
        loaded, votes_by_key = read_decisions(path)
        assert loaded == decisions
        for r in records:
            assert votes_by_key[(r.para_id, r.dimension)] == r.votes

    def test_schema_fields(self, tmp_path):
        import json

        paragraphs, bundle, cache = build_fixture(n=3)
        decisions, records = classify_corpus(paragraphs, bundle, cache)
        path = tmp_path / "d.jsonl"
        write_decisions(decisions, records, path)
        row = json.loads(path.read_text().splitlines()[0])
        assert set(row) == {"para_id", "dim", "votes", "positive_votes", "decision", "threshold"}
        assert set(row["votes"]) == set(KIND_NAMES)
