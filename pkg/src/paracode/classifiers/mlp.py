"""One-hidden-layer perceptron: ReLU units, logistic output, Adam updates.

Weights initialize uniformly in +-sqrt(6 / (fan_in + fan_out)) from the
seeded generator; minibatch order reshuffles per epoch from the same
generator, so training is fully reproducible given (data order, hyper,
seed). Training stops early once the full-batch loss improves by less than
``early_stop_tol`` for ``early_stop_patience`` consecutive epochs.
"""

from __future__ import annotations

import numpy as np

from .base import LearnerKind, MLPHyper, TrainedModel, TrainingSet, sample_weights, sigmoid
from ..errors import ShapeMismatch

PARAM_NAMES = ("W1", "b1", "w2", "b2")


def mlp_forward_backward(network: dict[str, np.ndarray], batch,
                         sample_weight: np.ndarray | None = None):
    """Mean cross-entropy loss and its exact gradients for one batch.

    ``network`` holds W1 (d, h), b1 (h,), w2 (h,), b2 (scalar); ``batch``
    is an (X, y) pair. Exposed separately from fit so gradients can be
    verified against finite differences.
    """
    X, y = batch
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    W1, b1, w2, b2 = (np.asarray(network[k], dtype=np.float64) for k in PARAM_NAMES)
    if X.ndim != 2 or W1.ndim != 2 or X.shape[1] != W1.shape[0]:
        raise ShapeMismatch(f"X {X.shape} incompatible with W1 {W1.shape}")
    if b1.shape != (W1.shape[1],) or w2.shape != (W1.shape[1],):
        raise ShapeMismatch("hidden-layer parameter shapes are inconsistent")

    n = X.shape[0]
    z1 = X @ W1 + b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ w2 + float(b2)
    losses = np.logaddexp(0.0, z2) - y * z2
    resid = sigmoid(z2) - y
    if sample_weight is not None:
        losses = losses * sample_weight
        resid = resid * sample_weight
    loss = float(losses.sum() / n)

    g2 = resid / n
    grad_w2 = a1.T @ g2
    grad_b2 = np.float64(g2.sum())
    dz1 = np.outer(g2, w2) * (z1 > 0.0)
    grad_W1 = X.T @ dz1
    grad_b1 = dz1.sum(axis=0)
    grads = {"W1": grad_W1, "b1": grad_b1, "w2": grad_w2, "b2": grad_b2}
    return loss, grads


def _init_network(dim: int, hidden: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    lim1 = np.sqrt(6.0 / (dim + hidden))
    lim2 = np.sqrt(6.0 / (hidden + 1))
    return {
        "W1": rng.uniform(-lim1, lim1, size=(dim, hidden)),
        "b1": np.zeros(hidden, dtype=np.float64),
        "w2": rng.uniform(-lim2, lim2, size=hidden),
        "b2": np.float64(0.0),
    }


def fit_mlp(data: TrainingSet, hyper: MLPHyper, seed: int) -> TrainedModel:
    X = data.X
    y = data.y.astype(np.float64)
    weight = sample_weights(data.y, hyper.class_weight)
    rng = np.random.default_rng(seed)
    net = _init_network(data.dim, hyper.hidden, rng)

    m = {k: np.zeros_like(v) for k, v in net.items()}
    v = {k: np.zeros_like(val) for k, val in net.items()}
    t = 0
    history = []
    streak = 0
    for _ in range(hyper.max_epochs):
        perm = rng.permutation(data.n)
        for start in range(0, data.n, hyper.batch_size):
            idx = perm[start:start + hyper.batch_size]
            bw = weight[idx] if weight is not None else None
            _, grads = mlp_forward_backward(net, (X[idx], y[idx]), bw)
            t += 1
            for key in PARAM_NAMES:
                m[key] = hyper.beta1 * m[key] + (1 - hyper.beta1) * grads[key]
                v[key] = hyper.beta2 * v[key] + (1 - hyper.beta2) * grads[key] ** 2
                m_hat = m[key] / (1 - hyper.beta1 ** t)
                v_hat = v[key] / (1 - hyper.beta2 ** t)
                net[key] = net[key] - hyper.learning_rate * m_hat / (np.sqrt(v_hat) + hyper.eps)
        epoch_loss, _ = mlp_forward_backward(net, (X, y), weight)
        history.append(epoch_loss)
        if len(history) >= 2:
            streak = streak + 1 if history[-2] - history[-1] < hyper.early_stop_tol else 0
            if streak >= hyper.early_stop_patience:
                break

    return TrainedModel(
        kind=LearnerKind.mlp,
        dim=data.dim,
        params={k: np.asarray(net[k], dtype=np.float64) for k in PARAM_NAMES},
        hyper=hyper,
        seed=seed,
        objective_history=tuple(history),
    )


def mlp_scores(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    W1 = model.params["W1"]
    b1 = model.params["b1"]
    w2 = model.params["w2"]
    b2 = float(model.params["b2"])
    a1 = np.maximum(X @ W1 + b1, 0.0)
    return sigmoid(a1 @ w2 + b2)
