"""Support vector machines trained from scratch.

The linear machine minimizes the soft-margin primal
    0.5*||w||^2 + C * sum_i max(0, 1 - y_i*(w.x_i + b))
by deterministic subgradient descent with tail averaging. The RBF machine
solves the dual soft-margin problem by pairwise coordinate steps on the
most-violating pair until the optimality gap falls below tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    """Dual solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message, kkt_violation):
        super().__init__(message)
        self.kkt_violation = kkt_violation


def _centroid_warm_start(X: np.ndarray, y: np.ndarray):
    """Deterministic start: the nearest-centroid separator scaled so class
    centroids sit at margin +/-1. Keeps clearly satisfied points inactive
    from the first iteration."""
    mu_pos = X[y > 0].mean(axis=0)
    mu_neg = X[y < 0].mean(axis=0)
    delta = mu_pos - mu_neg
    norm2 = float(delta @ delta)
    if norm2 == 0:
        return np.zeros(X.shape[1]), 0.0
    w = 2.0 * delta / norm2
    b = -float(w @ (mu_pos + mu_neg)) / 2.0
    return w, b


def linear_svm_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray,
                         C: float) -> float:
    margins = y * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * float(w @ w) + C * float(hinge.sum())


def train_linear_svm(X: np.ndarray, y: np.ndarray, C: float = 1.0,
                     iterations: int = 20000):
    """Subgradient descent on the soft-margin primal with tail averaging.

    Steps shrink as 1/(t+1) (unit curvature from the regularizer); the
    returned (w, b) is the average over the final half of the iterates.
    """
    if not C > 0:
        raise ValueError(f"C must be > 0, got {C}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present")
    w, b = _centroid_warm_start(X, y)
    tail_start = iterations // 2
    w_sum = np.zeros_like(w)
    b_sum = 0.0
    tail_count = 0
    for t in range(iterations):
        margins = y * (X @ w + b)
        violated = margins < 1.0
        grad_w = w - C * (y[violated] @ X[violated])
        grad_b = -C * float(y[violated].sum())
        step = 1.0 / (t + 1.0)
        w = w - step * grad_w
        b = b - step * grad_b
        if t >= tail_start:
            w_sum += w
            b_sum += b
            tail_count += 1
    w_avg = w_sum / tail_count
    b_avg = b_sum / tail_count
    # keep whichever of the raw/averaged iterates has the lower objective
    if linear_svm_objective(w, b, X, y, C) < linear_svm_objective(w_avg, b_avg, X, y, C):
        return w, b
    return w_avg, b_avg


# ---------------------------------------------------------------------------
# RBF dual solver


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    """k(a, b) = exp(-gamma * ||a - b||^2) for all row pairs."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    sq = (np.sum(A ** 2, axis=1)[:, None] + np.sum(B ** 2, axis=1)[None, :]
          - 2.0 * A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    """Soft-margin dual value sum(alpha) - 0.5 * alpha' Q alpha, Q = yy' * K."""
    v = alpha * y
    return float(alpha.sum() - 0.5 * v @ K @ v)


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    kkt_violation: float
    objective: float


def smo_solve(X: np.ndarray, y: np.ndarray, C: float, gamma: float,
              tol: float = 1e-3, max_iter: int = 200_000) -> SmoResult:
    """Most-violating-pair coordinate ascent on the RBF dual.

    Maintains f_i = sum_k alpha_k y_k k(x_i, x_k); kernel columns are
    computed on demand so no n*n matrix is stored. Terminates when the
    largest KKT violation (the up/low gradient gap) is below `tol`.
    """
    if not C > 0:
        raise ValueError(f"C must be > 0, got {C}")
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    alpha = np.zeros(n)
    f = np.zeros(n)          # decision values without bias
    diag = np.ones(n)        # k(x, x) = 1 for the RBF kernel

    def kernel_col(i):
        d = X - X[i]
        return np.exp(-gamma * np.sum(d * d, axis=1))

    it = 0
    gap = np.inf
    while it < max_iter:
        E = f - y
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmin(E[up])])
        j = int(np.flatnonzero(low)[np.argmax(E[low])])
        gap = float(E[j] - E[i])
        if gap <= tol:
            break

        Ki = kernel_col(i)
        Kj = kernel_col(j)
        eta = diag[i] + diag[j] - 2.0 * Ki[j]
        if eta <= 1e-12:
            eta = 1e-12
        s = y[i] * y[j]
        # optimize alpha_j along the constraint line, then clip to its box
        alpha_j_new = alpha[j] + y[j] * (E[i] - E[j]) / eta
        if s < 0:
            L = max(0.0, alpha[j] - alpha[i])
            H = min(C, C + alpha[j] - alpha[i])
        else:
            L = max(0.0, alpha[i] + alpha[j] - C)
            H = min(C, alpha[i] + alpha[j])
        alpha_j_new = min(max(alpha_j_new, L), H)
        delta_j = alpha_j_new - alpha[j]
        if delta_j == 0.0:
            break  # no movement possible on the most violating pair
        alpha_i_new = alpha[i] - s * delta_j
        delta_i = alpha_i_new - alpha[i]
        alpha[i] = alpha_i_new
        alpha[j] = alpha_j_new
        f += delta_i * y[i] * Ki + delta_j * y[j] * Kj
        it += 1

    if gap > tol:
        raise ConvergenceError(
            f"dual solver stopped after {it} iterations with KKT violation {gap:.3e}",
            kkt_violation=gap)

    bias = _solve_bias(alpha, y, f, C)
    v = alpha * y
    obj = float(alpha.sum() - 0.5 * v @ f)
    return SmoResult(alpha=alpha, bias=bias, iterations=it,
                     kkt_violation=max(gap, 0.0), objective=obj)


def _solve_bias(alpha, y, f, C):
    free = (alpha > 1e-8) & (alpha < C - 1e-8)
    if free.any():
        return float(np.mean(y[free] - f[free]))
    # no free vector: take the midpoint of the KKT-feasible bias interval
    E = f - y
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    b_lower = -E[up].min() if up.any() else 0.0
    b_upper = -E[low].max() if low.any() else 0.0
    return float((b_lower + b_upper) / 2.0)


SUPPORT_EPS = 1e-8


def train_rbf_svm(X: np.ndarray, y: np.ndarray, C: float, gamma: float,
                  tol: float = 1e-3, max_iter: int = 200_000) -> dict:
    """Solve the RBF dual and keep only the support vectors."""
    res = smo_solve(X, y, C, gamma, tol=tol, max_iter=max_iter)
    sv = res.alpha > SUPPORT_EPS
    return {"support_vectors": np.asarray(X, dtype=float)[sv],
            "dual_coef": (res.alpha * y)[sv],
            "alpha": res.alpha[sv],
            "bias": res.bias, "C": C, "gamma": gamma,
            "iterations": res.iterations, "kkt_violation": res.kkt_violation,
            "objective": res.objective}


def rbf_decision(params: dict, X: np.ndarray) -> np.ndarray:
    K = rbf_kernel(np.atleast_2d(X), params["support_vectors"], params["gamma"])
    return K @ params["dual_coef"] + params["bias"]
