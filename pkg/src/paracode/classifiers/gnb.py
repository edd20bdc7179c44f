"""Gaussian naive Bayes with per-feature likelihoods.

Class priors come from training frequencies (or are equalized under the
"balanced" class-weight option). Per-feature variances get an additive
smoothing term of ``var_smoothing`` times the largest per-feature variance
of the whole training matrix, so likelihoods stay finite on features that
are constant within a class.
"""

from __future__ import annotations

import numpy as np

from .base import GNBHyper, LearnerKind, TrainedModel, TrainingSet, sigmoid

_LOG_2PI = np.log(2.0 * np.pi)


def fit_gnb(data: TrainingSet, hyper: GNBHyper, seed: int) -> TrainedModel:
    X, y = data.X, data.y
    max_var = float(np.var(X, axis=0).max())
    epsilon = hyper.var_smoothing * max_var
    if epsilon == 0.0:
        epsilon = hyper.var_smoothing  # degenerate all-constant features

    theta = np.empty((2, data.dim), dtype=np.float64)
    var = np.empty((2, data.dim), dtype=np.float64)
    priors = np.empty(2, dtype=np.float64)
    for c in (0, 1):
        Xc = X[y == c]
        theta[c] = Xc.mean(axis=0)
        var[c] = Xc.var(axis=0) + epsilon
        priors[c] = Xc.shape[0] / data.n
    if hyper.class_weight == "balanced":
        priors[:] = 0.5

    return TrainedModel(
        kind=LearnerKind.gnb,
        dim=data.dim,
        params={
            "class_log_prior": np.log(priors),
            "theta": theta,
            "var": var,
        },
        hyper=hyper,
        seed=seed,
    )


def gnb_joint_log_likelihood(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """(n, 2) array of log prior + sum of per-feature Gaussian log densities."""
    theta = model.params["theta"]
    var = model.params["var"]
    log_prior = model.params["class_log_prior"]
    jll = np.empty((X.shape[0], 2), dtype=np.float64)
    for c in (0, 1):
        log_dens = -0.5 * (_LOG_2PI + np.log(var[c]) + (X - theta[c]) ** 2 / var[c])
        jll[:, c] = log_prior[c] + log_dens.sum(axis=1)
    return jll


def gnb_scores(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    jll = gnb_joint_log_likelihood(model, X)
    return sigmoid(jll[:, 1] - jll[:, 0])
