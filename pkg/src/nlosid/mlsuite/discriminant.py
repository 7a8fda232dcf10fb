"""Gaussian discriminant classifiers: shared-covariance (linear) and
per-class-covariance (quadratic) variants, estimated in closed form."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

# rank-repair ridge, relative to the average eigenvalue scale
RIDGE_SCALE = 1e-6


def _covariance(Xc: np.ndarray, mean: np.ndarray, ddof: int) -> np.ndarray:
    centered = Xc - mean
    return centered.T @ centered / (len(Xc) - ddof)


def _ensure_spd(cov: np.ndarray, context: str):
    """Cholesky check; nearly singular matrices get a small ridge eps*I with
    eps = RIDGE_SCALE * trace/dim. Still-singular input is an error."""
    dim = cov.shape[0]
    try:
        np.linalg.cholesky(cov)
        return cov, False
    except np.linalg.LinAlgError:
        eps = RIDGE_SCALE * float(np.trace(cov)) / dim
        if eps <= 0:
            raise ValueError(f"{context}: covariance has nonpositive trace; cannot regularize")
        repaired = cov + eps * np.eye(dim)
        try:
            np.linalg.cholesky(repaired)
        except np.linalg.LinAlgError:
            raise ValueError(f"{context}: covariance singular even after ridge {eps:g}")
        return repaired, True


def _class_stats(X: np.ndarray, y: np.ndarray):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    stats = []
    for cls in (-1.0, 1.0):
        Xc = X[y == cls]
        if len(Xc) <= X.shape[1]:
            raise ValueError(f"class {cls:+.0f} needs more samples than the feature dimension")
        stats.append((cls, Xc))
    return X, y, stats


def train_lda(X: np.ndarray, y: np.ndarray) -> dict:
    """Shared-covariance Gaussian discriminant with empirical priors.

    The pooled covariance uses the unbiased normalization (n - 2 classes).
    """
    X, y, stats = _class_stats(X, y)
    n = len(X)
    means, priors, scatter = {}, {}, np.zeros((X.shape[1], X.shape[1]))
    for cls, Xc in stats:
        mu = Xc.mean(axis=0)
        means[cls] = mu
        priors[cls] = len(Xc) / n
        centered = Xc - mu
        scatter += centered.T @ centered
    cov = scatter / (n - 2)
    cov, regularized = _ensure_spd(cov, "lda pooled covariance")
    return {"mean_neg": means[-1.0], "mean_pos": means[1.0],
            "cov": cov, "log_prior_neg": float(np.log(priors[-1.0])),
            "log_prior_pos": float(np.log(priors[1.0])), "regularized": regularized}


def train_qda(X: np.ndarray, y: np.ndarray) -> dict:
    """Per-class-covariance Gaussian discriminant with empirical priors."""
    X, y, stats = _class_stats(X, y)
    n = len(X)
    out = {"regularized": False}
    for cls, Xc in stats:
        tag = "neg" if cls < 0 else "pos"
        mu = Xc.mean(axis=0)
        cov = _covariance(Xc, mu, ddof=1)
        cov, reg = _ensure_spd(cov, f"qda covariance ({tag})")
        out[f"mean_{tag}"] = mu
        out[f"cov_{tag}"] = cov
        out[f"log_prior_{tag}"] = float(np.log(len(Xc) / n))
        out["regularized"] = out["regularized"] or reg
    return out


def _log_gaussian(X: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    dim = cov.shape[0]
    chol = np.linalg.cholesky(cov)
    half = solve_triangular(chol, (X - mean).T, lower=True)
    maha = np.sum(half ** 2, axis=0)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return -0.5 * (maha + logdet + dim * np.log(2.0 * np.pi))


def lda_score(params: dict, X: np.ndarray) -> np.ndarray:
    """Log-posterior odds of the positive class under the shared covariance."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    pos = _log_gaussian(X, params["mean_pos"], params["cov"]) + params["log_prior_pos"]
    neg = _log_gaussian(X, params["mean_neg"], params["cov"]) + params["log_prior_neg"]
    return pos - neg


def qda_score(params: dict, X: np.ndarray) -> np.ndarray:
    """Log-posterior odds of the positive class under per-class covariances."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    pos = _log_gaussian(X, params["mean_pos"], params["cov_pos"]) + params["log_prior_pos"]
    neg = _log_gaussian(X, params["mean_neg"], params["cov_neg"]) + params["log_prior_neg"]
    return pos - neg
