"""Shared classifier plumbing: training sets, hyperparameters, trained models.

Five learner kinds exist, each fit once per label dimension. Scores are
monotone confidences: probabilities for logreg / gnb / mlp, the signed
kernel margin for svm, and the positive-vote fraction for knn. The
per-kind decision rule maps score to label; knn uses a strict threshold so
vote ties resolve toward label 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import DimensionMismatch, NonFiniteFeature, SingleClassTraining


class LearnerKind(str, Enum):
    logreg = "logreg"
    gnb = "gnb"
    svm = "svm"
    mlp = "mlp"
    knn = "knn"


ALL_KINDS = tuple(LearnerKind)


@dataclass
class TrainingSet:
    """Feature matrix + binary labels for one label dimension."""

    X: np.ndarray
    y: np.ndarray
    dimension: str = "pc"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise DimensionMismatch(f"X must be 2-D, got shape {self.X.shape}")
        if self.y.ndim != 1 or self.y.shape[0] != self.X.shape[0]:
            raise DimensionMismatch(
                f"y shape {self.y.shape} does not match X shape {self.X.shape}"
            )
        if self.X.shape[0] < 2:
            raise ValueError("training set needs at least 2 examples")
        if not np.all(np.isfinite(self.X)):
            raise NonFiniteFeature("training features contain NaN or Inf")
        labels = set(np.unique(self.y).tolist())
        if not labels <= {0, 1}:
            raise ValueError(f"labels must be binary 0/1, got {sorted(labels)}")
        if labels != {0, 1}:
            raise SingleClassTraining(
                f"training set for {self.dimension!r} contains a single class"
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]


# ----------------------------------------------------------------------
# Hyperparameters (pinned reference configuration)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LogRegHyper:
    C: float = 1.0  # l2 strength is 1/C
    tol: float = 1e-6  # gradient-norm stopping tolerance
    max_iter: int = 1000
    class_weight: Optional[str] = None  # None | "balanced"


@dataclass(frozen=True)
class GNBHyper:
    var_smoothing: float = 1e-9  # scaled by the largest per-feature variance
    class_weight: Optional[str] = None


@dataclass(frozen=True)
class SVMHyper:
    C: float = 1.0
    gamma: Optional[float] = None  # None -> 1 / (dim * mean per-feature variance)
    kernel: str = "rbf"  # "rbf" | "linear"
    kkt_tol: float = 1e-3
    max_pair_updates: int = 10_000
    class_weight: Optional[str] = None


@dataclass(frozen=True)
class MLPHyper:
    hidden: int = 100
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 200
    early_stop_tol: float = 1e-4
    early_stop_patience: int = 10
    class_weight: Optional[str] = None


@dataclass(frozen=True)
class KNNHyper:
    k: int = 5  # capped at the training-set size when larger
    class_weight: Optional[str] = None


@dataclass(frozen=True)
class HyperParams:
    logreg: LogRegHyper = field(default_factory=LogRegHyper)
    gnb: GNBHyper = field(default_factory=GNBHyper)
    svm: SVMHyper = field(default_factory=SVMHyper)
    mlp: MLPHyper = field(default_factory=MLPHyper)
    knn: KNNHyper = field(default_factory=KNNHyper)

    def for_kind(self, kind: LearnerKind):
        return getattr(self, LearnerKind(kind).value)


HYPER_TYPES = {
    LearnerKind.logreg: LogRegHyper,
    LearnerKind.gnb: GNBHyper,
    LearnerKind.svm: SVMHyper,
    LearnerKind.mlp: MLPHyper,
    LearnerKind.knn: KNNHyper,
}


# ----------------------------------------------------------------------
# Trained model container and decision rules
# ----------------------------------------------------------------------

@dataclass
class TrainedModel:
    kind: LearnerKind
    dim: int
    params: dict[str, np.ndarray]
    hyper: object
    seed: int
    objective_history: tuple[float, ...] = ()

    @property
    def final_objective(self) -> Optional[float]:
        return self.objective_history[-1] if self.objective_history else None


@dataclass(frozen=True)
class Prediction:
    label: int
    score: float


# (threshold, inclusive): label 1 iff score > threshold, or >= when inclusive.
# knn is exclusive so a split vote (score exactly 0.5) resolves to label 0.
DECISION_RULES: dict[LearnerKind, tuple[float, bool]] = {
    LearnerKind.logreg: (0.5, True),
    LearnerKind.gnb: (0.5, True),
    LearnerKind.mlp: (0.5, True),
    LearnerKind.svm: (0.0, True),
    LearnerKind.knn: (0.5, False),
}


def decide(kind: LearnerKind, scores: np.ndarray) -> np.ndarray:
    threshold, inclusive = DECISION_RULES[LearnerKind(kind)]
    if inclusive:
        return (scores >= threshold).astype(np.int64)
    return (scores > threshold).astype(np.int64)


def check_input_dim(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != model.dim:
        raise DimensionMismatch(
            f"{model.kind.value} model expects dim {model.dim}, got shape {X.shape}"
        )
    return X


def sample_weights(y: np.ndarray, class_weight: Optional[str]) -> Optional[np.ndarray]:
    """Per-sample weights summing to n; "balanced" equalizes class mass."""
    if class_weight is None:
        return None
    if class_weight != "balanced":
        raise ValueError(f"unknown class_weight {class_weight!r}")
    n = len(y)
    n_pos = int(y.sum())
    n_neg = n - n_pos
    w = np.where(y == 1, n / (2.0 * n_pos), n / (2.0 * n_neg))
    return w


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out
