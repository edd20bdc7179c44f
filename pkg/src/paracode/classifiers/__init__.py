"""The five binary classifiers: fit / predict dispatch over learner kinds."""

from __future__ import annotations

import numpy as np

from .base import (
    ALL_KINDS,
    DECISION_RULES,
    GNBHyper,
    HYPER_TYPES,
    HyperParams,
    KNNHyper,
    LearnerKind,
    LogRegHyper,
    MLPHyper,
    Prediction,
    SVMHyper,
    TrainedModel,
    TrainingSet,
    check_input_dim,
    decide,
    sigmoid,
)
from .bundle import ModelBundle, load_bundle, model_to_bytes, save_bundle, training_checksum
from .gnb import fit_gnb, gnb_joint_log_likelihood, gnb_scores
from .knn import fit_knn, knn_scores
from .logreg import fit_logreg, logreg_loss_grad, logreg_scores
from .mlp import fit_mlp, mlp_forward_backward, mlp_scores
from .svm import fit_svm, svm_decision, svm_scores

_FITTERS = {
    LearnerKind.logreg: fit_logreg,
    LearnerKind.gnb: fit_gnb,
    LearnerKind.svm: fit_svm,
    LearnerKind.mlp: fit_mlp,
    LearnerKind.knn: fit_knn,
}

_SCORERS = {
    LearnerKind.logreg: logreg_scores,
    LearnerKind.gnb: gnb_scores,
    LearnerKind.svm: svm_scores,
    LearnerKind.mlp: mlp_scores,
    LearnerKind.knn: knn_scores,
}


def fit(kind: LearnerKind | str, data: TrainingSet,
        hyper: HyperParams | object | None = None, seed: int = 0) -> TrainedModel:
    """Train one model. ``hyper`` may be a full HyperParams block, the
    kind-specific hyper dataclass, or None for the pinned defaults."""
    kind = LearnerKind(kind)
    if hyper is None:
        kind_hyper = HYPER_TYPES[kind]()
    elif isinstance(hyper, HyperParams):
        kind_hyper = hyper.for_kind(kind)
    else:
        kind_hyper = hyper
    return _FITTERS[kind](data, kind_hyper, seed)


def score_batch(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = check_input_dim(model, X)
    return np.asarray(_SCORERS[model.kind](model, X), dtype=np.float64)


def predict_batch(model: TrainedModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = score_batch(model, X)
    return decide(model.kind, scores), scores


def predict(model: TrainedModel, x: np.ndarray) -> Prediction:
    labels, scores = predict_batch(model, np.asarray(x, dtype=np.float64).reshape(1, -1))
    return Prediction(label=int(labels[0]), score=float(scores[0]))


__all__ = [
    "ALL_KINDS",
    "DECISION_RULES",
    "GNBHyper",
    "HyperParams",
    "KNNHyper",
    "LearnerKind",
    "LogRegHyper",
    "MLPHyper",
    "ModelBundle",
    "Prediction",
    "SVMHyper",
    "TrainedModel",
    "TrainingSet",
    "decide",
    "fit",
    "fit_gnb",
    "fit_knn",
    "fit_logreg",
    "fit_mlp",
    "fit_svm",
    "gnb_joint_log_likelihood",
    "gnb_scores",
    "knn_scores",
    "load_bundle",
    "logreg_loss_grad",
    "logreg_scores",
    "mlp_forward_backward",
    "mlp_scores",
    "model_to_bytes",
    "predict",
    "predict_batch",
    "save_bundle",
    "score_batch",
    "sigmoid",
    "svm_decision",
    "svm_scores",
    "training_checksum",
]
