"""k-nearest-neighbors with Euclidean distance and unweighted majority vote.

The model stores the training set verbatim. Distance ties break toward the
earlier training row (stable sort over insertion order); a split vote
resolves to label 0 via the strict decision threshold. ``k`` larger than
the training set is capped at the training-set size.
"""

from __future__ import annotations

import numpy as np

from .base import KNNHyper, LearnerKind, TrainedModel, TrainingSet


def fit_knn(data: TrainingSet, hyper: KNNHyper, seed: int) -> TrainedModel:
    if hyper.k < 1:
        raise ValueError("k must be >= 1")
    return TrainedModel(
        kind=LearnerKind.knn,
        dim=data.dim,
        params={"X": data.X.copy(), "y": data.y.copy()},
        hyper=hyper,
        seed=seed,
    )


def knn_scores(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Positive-vote fraction among the k nearest training points."""
    train_X = model.params["X"]
    train_y = model.params["y"]
    k = min(model.hyper.k, train_X.shape[0])
    if k < model.hyper.k and k % 2 == 0 and k > 1:
        k -= 1  # capping must not introduce vote ties an odd k avoided

    # squared distances via the expanded form, chunked over queries
    train_sq = np.einsum("ij,ij->i", train_X, train_X)
    scores = np.empty(X.shape[0], dtype=np.float64)
    chunk = max(1, int(2e7) // max(1, train_X.shape[0]))
    for start in range(0, X.shape[0], chunk):
        Q = X[start:start + chunk]
        d2 = train_sq[:, None] - 2.0 * (train_X @ Q.T) + np.einsum("ij,ij->i", Q, Q)[None, :]
        np.maximum(d2, 0.0, out=d2)
        order = np.argsort(d2, axis=0, kind="stable")[:k]
        scores[start:start + Q.shape[0]] = train_y[order].mean(axis=0)
    return scores
