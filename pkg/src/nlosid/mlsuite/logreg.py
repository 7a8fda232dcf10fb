"""Logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DivergenceError(RuntimeError):
    """Training loss became non-finite (step too large for the data)."""


@dataclass(frozen=True)
class LogregConfig:
    step: float = 0.5
    max_iter: int = 2000
    grad_tol: float = 1e-6
    max_step_halvings: int = 50


def nll_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray):
    """Mean negative log-likelihood and its gradient, labels in {-1, +1}.

    Uses log(1 + exp(-y*z)) in its overflow-safe form.
    """
    z = X @ w + b
    margins = y * z
    loss = float(np.mean(np.logaddexp(0.0, -margins)))
    # d/dz of log(1+exp(-y z)) = -y * sigmoid(-y z)
    s = _sigmoid(-margins)
    coeff = -y * s
    grad_w = X.T @ coeff / len(y)
    grad_b = float(np.mean(coeff))
    return loss, grad_w, grad_b


def _sigmoid(t):
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def train_logreg(X: np.ndarray, y: np.ndarray, config: LogregConfig = LogregConfig()):
    """Gradient descent on the mean logistic loss with a fixed step.

    Steps that would increase the loss are rejected and retried at half the
    step, so the accepted-loss sequence is nonincreasing. Stops when the
    gradient norm drops below `grad_tol` or the iteration cap is reached.

    Returns (weights, bias, info) with info carrying convergence details.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if set(np.unique(y)) - {-1.0, 1.0}:
        raise ValueError("labels must be -1/+1")
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present")
    w = np.zeros(X.shape[1])
    b = 0.0
    step = config.step
    loss, grad_w, grad_b = nll_and_grad(w, b, X, y)
    if not np.isfinite(loss):
        raise DivergenceError("initial loss is non-finite")
    iterations = 0
    converged = False
    halvings = 0
    while iterations < config.max_iter:
        gnorm = float(np.sqrt(grad_w @ grad_w + grad_b ** 2))
        if gnorm < config.grad_tol:
            converged = True
            break
        w_new = w - step * grad_w
        b_new = b - step * grad_b
        new_loss, new_gw, new_gb = nll_and_grad(w_new, b_new, X, y)
        if not np.isfinite(new_loss):
            raise DivergenceError(f"loss became non-finite at iteration {iterations} (step too large)")
        if new_loss > loss:
            halvings += 1
            if halvings > config.max_step_halvings:
                raise DivergenceError("step halving limit exceeded without progress")
            step *= 0.5
            continue
        w, b, loss, grad_w, grad_b = w_new, b_new, new_loss, new_gw, new_gb
        iterations += 1
    info = {"iterations": iterations, "converged": converged,
            "final_loss": loss, "final_grad_norm": float(np.sqrt(grad_w @ grad_w + grad_b ** 2)),
            "final_step": step}
    return w, b, info
