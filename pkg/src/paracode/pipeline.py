"""End-to-end commands tying corpus, embeddings, models and reports together.

``cmd_train`` reads only train-role paragraphs (the holdout partition is
never touched on any path reachable from it); ``cmd_evaluate`` is the sole
reader of the holdout role. All artifacts these commands write are
deterministic functions of their inputs and the seed.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path

from .classifiers import (
    ALL_KINDS,
    ModelBundle,
    TrainingSet,
    fit,
    save_bundle,
    training_checksum,
)
from .config import PipelineConfig
from .corpus import DIMENSIONS, Corpus, DatasetRole
from .embedding import VectorCache
from .ensemble import (
    classify_corpus,
    make_shortlist,
    mean_confidence,
    write_decisions,
)
from .errors import MissingGold, RoleEmpty
from .evaluation import (
    ManifestoReport,
    MetricReport,
    aggregate_manifesto,
    confusion,
    emit_figure_series,
    emit_report,
    metrics,
)
from .store import ReviewStore

log = logging.getLogger("paracode")


def build_training_sets(
    corpus: Corpus, vectors: VectorCache
) -> dict[str, tuple[list[str], TrainingSet]]:
    """Per-dimension training matrices from gold-labeled train-role paragraphs."""
    train_paragraphs = corpus.paragraphs(role=DatasetRole.train)
    if not train_paragraphs:
        raise RoleEmpty("no paragraphs in the train role")
    datasets = {}
    for dimension in DIMENSIONS:
        ids = []
        labels = []
        for p in train_paragraphs:
            gold = p.labels.get(dimension)
            if gold is not None:
                ids.append(p.para_id)
                labels.append(gold)
        if not ids:
            raise MissingGold(f"train role has no gold labels for dimension {dimension!r}")
        X = vectors.matrix(ids)
        datasets[dimension] = (ids, TrainingSet(X, labels, dimension))
    return datasets


def cmd_train(
    config: PipelineConfig,
    corpus: Corpus,
    vectors: VectorCache,
    out_path: str | Path,
) -> ModelBundle:
    """Fit all ten models on the train partition and persist the bundle."""
    datasets = build_training_sets(corpus, vectors)
    bundle = ModelBundle(
        seed=config.seed,
        provider_fingerprint=vectors.fingerprint,
        train_checksum=training_checksum(datasets),
    )
    for dimension in DIMENSIONS:
        _, data = datasets[dimension]
        for kind in ALL_KINDS:
            started = time.perf_counter()
            model = fit(kind, data, config.hyper, seed=config.seed)
            elapsed = time.perf_counter() - started
            log.info(
                "trained %s/%s on %d paragraphs in %.2fs (objective=%s)",
                dimension, kind.value, data.n, elapsed,
                f"{model.final_objective:.6f}" if model.final_objective is not None else "n/a",
            )
            bundle.put(dimension, model)
    save_bundle(bundle, out_path)
    return bundle


def cmd_predict(
    config: PipelineConfig,
    bundle: ModelBundle,
    corpus: Corpus,
    vectors: VectorCache,
    out_path: str | Path | None = None,
):
    """Classify every paragraph on both dimensions; optionally persist."""
    paragraphs = corpus.paragraphs()
    decisions, votes = classify_corpus(paragraphs, bundle, vectors, config.threshold)
    if out_path is not None:
        write_decisions(decisions, votes, out_path)
    return decisions, votes


def evaluate_role(
    config: PipelineConfig,
    bundle: ModelBundle,
    corpus: Corpus,
    vectors: VectorCache,
    role: str,
) -> tuple[list[MetricReport], list[ManifestoReport]]:
    """Ensemble metrics per dimension plus per-manifesto aggregation."""
    role = DatasetRole(role)
    paragraphs = corpus.paragraphs(role=role)
    if not paragraphs:
        raise RoleEmpty(f"no paragraphs in the {role.value} role")
    decisions, _ = classify_corpus(paragraphs, bundle, vectors, config.threshold)
    by_key = {(d.para_id, d.dimension): d.decision for d in decisions}

    metric_reports = []
    for dimension in DIMENSIONS:
        gold = []
        pred = []
        for p in paragraphs:
            g = p.labels.get(dimension)
            if g is not None:
                gold.append(g)
                pred.append(by_key[(p.para_id, dimension)])
        if not gold:
            raise MissingGold(f"{role.value} role has no gold labels for {dimension!r}")
        metric_reports.append(
            metrics(confusion(gold, pred), dimension=dimension, role=role.value)
        )
    manifesto_reports = aggregate_manifesto(paragraphs, by_key)
    return metric_reports, manifesto_reports


def evaluate_decisions(
    corpus: Corpus,
    decisions_by_key: dict[tuple[str, str], int],
    role: str,
) -> tuple[list[MetricReport], list[ManifestoReport]]:
    """Evaluation over a precomputed decisions file instead of a bundle."""
    role = DatasetRole(role)
    paragraphs = corpus.paragraphs(role=role)
    if not paragraphs:
        raise RoleEmpty(f"no paragraphs in the {role.value} role")
    metric_reports = []
    for dimension in DIMENSIONS:
        gold = []
        pred = []
        for p in paragraphs:
            g = p.labels.get(dimension)
            if g is not None:
                gold.append(g)
                pred.append(decisions_by_key[(p.para_id, dimension)])
        if not gold:
            raise MissingGold(f"{role.value} role has no gold labels for {dimension!r}")
        metric_reports.append(
            metrics(confusion(gold, pred), dimension=dimension, role=role.value)
        )
    manifesto_reports = aggregate_manifesto(paragraphs, decisions_by_key)
    return metric_reports, manifesto_reports


def write_evaluation_artifacts(
    metric_reports: list[MetricReport],
    manifesto_reports: list[ManifestoReport],
    out_dir: str | Path,
    format: str = "csv",
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = {"table-text": "txt", "csv": "csv", "json": "json"}[format]
    written = []
    for name, payload in (
        (f"metrics.{ext}", emit_report(metric_reports, format)),
        (f"manifestos.{ext}", emit_report(manifesto_reports, format)),
        ("figure_pc.csv", emit_figure_series(manifesto_reports, "pc")),
        ("figure_ae.csv", emit_figure_series(manifesto_reports, "ae")),
    ):
        path = out_dir / name
        path.write_text(payload, encoding="utf-8")
        written.append(path)
    return written


def cmd_shortlist(
    config: PipelineConfig,
    bundle: ModelBundle,
    corpus: Corpus,
    vectors: VectorCache,
    store: ReviewStore,
    corpus_path: str | Path,
    session_id: str | None = None,
) -> tuple[dict, list[dict]]:
    """Classify, rank flagged paragraphs, and open a review session.

    With ``include_near_miss`` the queue also carries paragraphs one vote
    short of the threshold (marked, decision 0) for recall auditing.
    """
    paragraphs = corpus.paragraphs()
    decisions, votes = classify_corpus(paragraphs, bundle, vectors, config.threshold)
    entries = make_shortlist(decisions, votes)

    votes_by_key = {(v.para_id, v.dimension): v for v in votes}
    paragraph_by_id = {p.para_id: p for p in paragraphs}

    def queue_entry(para_id, dimension, positive_votes, mean_score, decision, near_miss):
        p = paragraph_by_id[para_id]
        record = votes_by_key[(para_id, dimension)]
        return {
            "para_id": para_id,
            "dimension": dimension,
            "positive_votes": positive_votes,
            "mean_score": mean_score,
            "votes": dict(record.votes),
            "model_decision": decision,
            "near_miss": near_miss,
            "text": p.text,
            "doc_id": p.doc_id,
            "party": p.party,
            "year": p.year,
            "register": p.register.value,
        }

    queue = [
        queue_entry(e.para_id, e.dimension, e.positive_votes, e.mean_score, 1, False)
        for e in entries
    ]
    if config.include_near_miss:
        near = [
            d for d in decisions
            if d.decision == 0 and d.positive_votes == config.threshold - 1
        ]
        near_entries = [
            (d, mean_confidence(votes_by_key[(d.para_id, d.dimension)])) for d in near
        ]
        near_entries.sort(key=lambda t: (-t[0].positive_votes, -t[1], t[0].para_id, t[0].dimension))
        queue.extend(
            queue_entry(d.para_id, d.dimension, d.positive_votes, score, 0, True)
            for d, score in near_entries
        )

    session = store.create_session(
        queue=queue,
        corpus_path=str(corpus_path),
        threshold=config.threshold,
        session_id=session_id,
    )
    return session, queue
