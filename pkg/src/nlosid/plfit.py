"""Least-squares pathloss parameterization.

Fits the log-distance model  pathloss_db = A + alpha * 10*log10(4*pi*d/lambda)
to labeled measurements, per scenario and SNR level, and reports the
residual noise scale alongside the fitted pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channelsim import Dataset, regressor_db


class RankDeficiencyError(ValueError):
    """Design matrix has no usable slope direction (single distance)."""


@dataclass(frozen=True)
class PathlossParams:
    """Fitted (or ground-truth) log-distance model parameters.

    n_obs == 0 marks parameters that were set rather than fitted.
    """

    intercept_A: float
    exponent_alpha: float
    residual_sigma: float = 0.0
    n_obs: int = 0

    def __post_init__(self):
        for name in ("intercept_A", "exponent_alpha", "residual_sigma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.residual_sigma < 0:
            raise ValueError(f"residual_sigma must be >= 0, got {self.residual_sigma}")
        if self.n_obs != 0 and self.n_obs < 2:
            raise ValueError(f"fitted params need n_obs >= 2, got {self.n_obs}")


@dataclass(frozen=True)
class DesignSystem:
    """Regression inputs: one regressor (dB) and one observation (dB) per row."""

    regressors: np.ndarray
    observations: np.ndarray
    source_indices: np.ndarray

    def __post_init__(self):
        x, y = self.regressors, self.observations
        if len(x) != len(y) or len(x) != len(self.source_indices):
            raise ValueError("regressors, observations, source_indices must have equal length")
        if len(x) < 2:
            raise ValueError(f"need at least 2 rows to fit, got {len(x)}")
        if not np.all(np.isfinite(y)):
            raise ValueError("observations contain non-finite values")
        if not np.all(np.isfinite(x)):
            raise ValueError("regressors contain non-finite values")
        if np.ptp(x) == 0.0:
            raise RankDeficiencyError("all regressors identical; slope is unidentifiable")

    def __len__(self):
        return len(self.regressors)


def build_design(dataset: Dataset, scenario: str | None, wav: float,
                 snr_level: str | None = None) -> DesignSystem:
    """Stack the filtered dataset into a regression system, order preserved."""
    keep = np.ones(len(dataset), dtype=bool)
    if scenario is not None:
        keep &= dataset.column("scenario") == scenario
    if snr_level is not None:
        keep &= dataset.column("snr_level") == snr_level
    idx = np.flatnonzero(keep)
    if len(idx) == 0:
        raise ValueError(f"no measurements match scenario={scenario!r}, snr_level={snr_level!r}")
    distances = dataset.column("distance")[idx]
    observations = dataset.column("pathloss_db")[idx]
    return DesignSystem(regressor_db(distances, wav), observations, idx)


def ls_fit(system: DesignSystem) -> PathlossParams:
    """Least-squares fit of (A, alpha) minimizing ||A + alpha*x - y||^2.

    Solved via an orthogonal factorization (SVD-backed lstsq), not by
    inverting normal equations. residual_sigma is the unbiased estimate
    sqrt(SSR / (n - 2)); zero for an exactly determined two-row system.
    """
    x, y = system.regressors, system.observations
    n = len(x)
    design = np.column_stack([x, np.ones(n)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2:
        raise RankDeficiencyError("design matrix is rank deficient")
    alpha, intercept = float(coef[0]), float(coef[1])
    residuals = y - design @ coef
    ssr = float(residuals @ residuals)
    sigma = math.sqrt(ssr / (n - 2)) if n > 2 else 0.0
    return PathlossParams(intercept_A=intercept, exponent_alpha=alpha,
                          residual_sigma=sigma, n_obs=n)


def slope_standard_error(x: np.ndarray, sigma: float) -> float:
    """Classical closed-form standard error of the fitted slope."""
    x = np.asarray(x, dtype=float)
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0:
        raise RankDeficiencyError("slope standard error undefined for constant regressor")
    return sigma / math.sqrt(sxx)


def pooled_sigma(los: PathlossParams, nlos: PathlossParams) -> float:
    """Single shared noise scale: RMS of the two per-scenario residual sigmas."""
    return math.sqrt((los.residual_sigma ** 2 + nlos.residual_sigma ** 2) / 2.0)


@dataclass
class FitTable:
    """Per-(scenario, snr_level) fit results with per-group failures kept."""

    fits: dict
    errors: dict

    def get(self, scenario: str, snr_level: str) -> PathlossParams:
        return self.fits[(scenario, snr_level)]

    def to_csv(self) -> str:
        lines = ["scenario,snr_level,alpha,A_db,sigma_db,n_obs"]
        for (scenario, snr), p in self.fits.items():
            lines.append(f"{scenario},{snr},{p.exponent_alpha!r},{p.intercept_A!r},"
                         f"{p.residual_sigma!r},{p.n_obs}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        rows = [("scenario", "snr_level", "alpha", "A_db", "sigma_db", "n_obs")]
        for (scenario, snr), p in self.fits.items():
            rows.append((scenario, snr, f"{p.exponent_alpha:.4f}", f"{p.intercept_A:.4f}",
                         f"{p.residual_sigma:.4f}", str(p.n_obs)))
        for key, msg in self.errors.items():
            rows.append((key[0], key[1], "ERROR", msg, "", ""))
        widths = [max(len(r[i]) for r in rows) for i in range(6)]
        out = []
        for r in rows:
            out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(out) + "\n"


def fit_all(dataset: Dataset, wav: float) -> FitTable:
    """Fit every (scenario, snr_level) group present in the dataset.

    Group failures (too few rows, rank deficiency) are collected per group
    instead of aborting the table.
    """
    scenarios = dataset.column("scenario")
    snrs = dataset.column("snr_level")
    groups = []
    seen = set()
    for s, t in zip(scenarios, snrs):
        if (s, t) not in seen:
            seen.add((s, t))
            groups.append((s, t))

    fits, errors = {}, {}
    for scenario, snr in groups:
        try:
            system = build_design(dataset, scenario, wav, snr_level=snr)
            fits[(scenario, snr)] = ls_fit(system)
        except (ValueError, RankDeficiencyError) as exc:
            errors[(scenario, snr)] = str(exc)
    return FitTable(fits=fits, errors=errors)
