"""Vote-threshold ensemble over the five classifiers, plus review shortlists.

A paragraph is flagged for a dimension when at least ``threshold`` of the
five models vote positive (default 2). Shortlists rank flagged paragraphs
by vote count, then mean model confidence, then para_id; the svm margin is
squashed through the logistic function before averaging so all five scores
share the [0, 1] scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .classifiers import ALL_KINDS, LearnerKind, ModelBundle, predict_batch
from .corpus import DIMENSIONS, Paragraph
from .embedding import VectorCache
from .errors import InconsistentInputs, ThresholdOutOfRange

DEFAULT_THRESHOLD = 2
N_MODELS = len(ALL_KINDS)
_KIND_KEYS = frozenset(k.value for k in ALL_KINDS)


@dataclass(frozen=True, slots=True)
class VoteRecord:
    para_id: str
    dimension: str
    votes: dict[str, int]  # learner kind -> 0/1
    scores: dict[str, float]

    def __post_init__(self):
        if self.votes.keys() != _KIND_KEYS or self.scores.keys() != _KIND_KEYS:
            raise ValueError("vote record must carry exactly the five learner kinds")


@dataclass(frozen=True, slots=True)
class EnsembleDecision:
    para_id: str
    dimension: str
    positive_votes: int
    decision: int
    threshold_used: int


@dataclass(frozen=True, slots=True)
class ShortlistEntry:
    para_id: str
    dimension: str
    positive_votes: int
    mean_score: float


def check_threshold(threshold: int):
    if not 1 <= threshold <= N_MODELS:
        raise ThresholdOutOfRange(f"threshold must be in 1..{N_MODELS}, got {threshold}")


def combine(votes: VoteRecord, threshold: int) -> EnsembleDecision:
    """Threshold the five votes into one decision. Pure function."""
    check_threshold(threshold)
    positive = sum(votes.votes.values())
    return EnsembleDecision(
        para_id=votes.para_id,
        dimension=votes.dimension,
        positive_votes=positive,
        decision=1 if positive >= threshold else 0,
        threshold_used=threshold,
    )


def _squash(kind: str, score: float) -> float:
    """Map a model score onto [0, 1]; svm margins go through the logistic."""
    if kind == LearnerKind.svm.value:
        if score >= 0:
            return 1.0 / (1.0 + math.exp(-score))
        e = math.exp(score)
        return e / (1.0 + e)
    return score


def mean_confidence(record: VoteRecord) -> float:
    return sum(_squash(k, s) for k, s in record.scores.items()) / N_MODELS


def classify_corpus(
    paragraphs: Sequence[Paragraph],
    bundle: ModelBundle,
    vectors: VectorCache,
    threshold: int = DEFAULT_THRESHOLD,
    dimensions: Sequence[str] = DIMENSIONS,
) -> tuple[list[EnsembleDecision], list[VoteRecord]]:
    """One decision per (paragraph, dimension); deterministic ordering."""
    check_threshold(threshold)
    bundle.ensure_complete(dimensions)
    decisions: list[EnsembleDecision] = []
    records: list[VoteRecord] = []
    if not paragraphs:
        return decisions, records

    para_ids = [p.para_id for p in paragraphs]
    X = vectors.matrix(para_ids)
    for dimension in dimensions:
        per_kind = {}
        for kind in ALL_KINDS:
            labels, scores = predict_batch(bundle.get(dimension, kind), X)
            per_kind[kind.value] = (labels, scores)
        for i, para_id in enumerate(para_ids):
            record = VoteRecord(
                para_id=para_id,
                dimension=dimension,
                votes={k: int(per_kind[k][0][i]) for k in per_kind},
                scores={k: float(per_kind[k][1][i]) for k in per_kind},
            )
            records.append(record)
            decisions.append(combine(record, threshold))
    return decisions, records


def make_shortlist(
    decisions: Iterable[EnsembleDecision],
    votes: Iterable[VoteRecord],
) -> list[ShortlistEntry]:
    """Flagged paragraphs ranked by (votes, mean confidence) descending.

    Decisions and vote records must cover the same (para_id, dimension)
    pairs; ties order by para_id so the ranking is total and deterministic.
    """
    decisions = list(decisions)
    by_key = {(v.para_id, v.dimension): v for v in votes}
    decision_keys = {(d.para_id, d.dimension) for d in decisions}
    if decision_keys != set(by_key):
        raise InconsistentInputs("decisions and vote records cover different paragraphs")

    entries = []
    for d in decisions:
        if d.decision != 1:
            continue
        record = by_key[(d.para_id, d.dimension)]
        entries.append(
            ShortlistEntry(
                para_id=d.para_id,
                dimension=d.dimension,
                positive_votes=d.positive_votes,
                mean_score=mean_confidence(record),
            )
        )
    entries.sort(key=lambda e: (-e.positive_votes, -e.mean_score, e.para_id, e.dimension))
    return entries


# ----------------------------------------------------------------------
# Decisions file (JSON lines)
# ----------------------------------------------------------------------

def write_decisions(
    decisions: Sequence[EnsembleDecision],
    votes: Sequence[VoteRecord],
    path: str | Path,
):
    by_key = {(v.para_id, v.dimension): v for v in votes}
    with Path(path).open("w", encoding="utf-8") as fh:
        for d in decisions:
            record = by_key[(d.para_id, d.dimension)]
            row = {
                "para_id": d.para_id,
                "dim": d.dimension,
                "votes": {k.value: record.votes[k.value] for k in ALL_KINDS},
                "positive_votes": d.positive_votes,
                "decision": d.decision,
                "threshold": d.threshold_used,
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_decisions(
    path: str | Path,
) -> tuple[list[EnsembleDecision], dict[tuple[str, str], dict[str, int]]]:
    """Load a decisions file; scores are not persisted, only the 0/1 votes."""
    decisions = []
    votes_by_key: dict[tuple[str, str], dict[str, int]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            key = (row["para_id"], row["dim"])
            votes_by_key[key] = {k: int(v) for k, v in row["votes"].items()}
            decisions.append(
                EnsembleDecision(
                    para_id=row["para_id"],
                    dimension=row["dim"],
                    positive_votes=int(row["positive_votes"]),
                    decision=int(row["decision"]),
                    threshold_used=int(row["threshold"]),
                )
            )
    return decisions, votes_by_key
