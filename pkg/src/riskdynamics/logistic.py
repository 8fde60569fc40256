"""L2-regularized logistic regression trained by damped Newton steps.

The bias is never penalized.  The optimizer backtracks on the Newton
direction until the (Armijo) decrease condition holds, so the loss is
monotonically non-increasing across iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OneClassError


@dataclass(frozen=True)
class LogisticConfig:
    lam: float = 1e-3       # L2 strength on the weights (bias excluded)
    tol: float = 1e-8       # gradient-norm convergence threshold
    max_iter: int = 100

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be non-negative")


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    lam: float
    iterations: int
    gradient_norm: float
    converged: bool
    loss_history: tuple[float, ...]


def loss_and_gradient(beta: np.ndarray, x: np.ndarray, y: np.ndarray,
                      lam: float) -> tuple[float, np.ndarray]:
    """Penalized negative log-likelihood and its gradient.

    ``beta`` stacks the weights followed by the bias.  The loss is
    sum_i log(1 + exp(m_i)) - y_i * m_i + lam/2 * ||w||^2 with
    m = x @ w + b, computed stably via logaddexp.
    """
    w, b = beta[:-1], beta[-1]
    margins = x @ w + b
    loss = float(np.logaddexp(0.0, margins).sum() - (y * margins).sum())
    loss += 0.5 * lam * float(w @ w)
    p = _sigmoid(margins)
    grad_w = x.T @ (p - y) + lam * w
    grad_b = (p - y).sum()
    return loss, np.concatenate([grad_w, [grad_b]])


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _hessian(beta: np.ndarray, x: np.ndarray, lam: float) -> np.ndarray:
    w, b = beta[:-1], beta[-1]
    p = _sigmoid(x @ w + b)
    r = p * (1.0 - p)
    xb = np.hstack([x, np.ones((x.shape[0], 1))])
    h = (xb * r[:, None]).T @ xb
    h[np.diag_indices(len(w))] += lam  # bias row/col stays unpenalized
    return h


def train_logistic(x, y, config: LogisticConfig | None = None) -> LogisticModel:
    """Fit by damped Newton until the gradient norm drops below tol."""
    config = config or LogisticConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(y)) < 2:
        raise OneClassError("training labels contain a single class")

    beta = np.zeros(x.shape[1] + 1)
    loss, grad = loss_and_gradient(beta, x, y, config.lam)
    history = [loss]
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < config.tol:
            iterations -= 1
            break
        h = _hessian(beta, x, config.lam)
        try:
            step = np.linalg.solve(h, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(h, grad, rcond=None)[0]

        # backtracking keeps the loss monotone
        t = 1.0
        directional = float(grad @ step)
        while t > 2 ** -30:
            candidate = beta - t * step
            new_loss, new_grad = loss_and_gradient(candidate, x, y, config.lam)
            if new_loss <= loss - 1e-4 * t * directional:
                break
            t /= 2
        beta, loss, grad = candidate, new_loss, new_grad
        history.append(loss)

    grad_norm = float(np.linalg.norm(grad))
    return LogisticModel(
        weights=beta[:-1].copy(),
        bias=float(beta[-1]),
        lam=config.lam,
        iterations=iterations,
        gradient_norm=grad_norm,
        converged=grad_norm < config.tol,
        loss_history=tuple(history),
    )


def predict_proba(model: LogisticModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return _sigmoid(x @ model.weights + model.bias)


def predict(model: LogisticModel, x) -> np.ndarray:
    return (predict_proba(model, x) > 0.5).astype(int)
