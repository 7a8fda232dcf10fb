"""Binary hypothesis test for NLOS identification.

Under both hypotheses the pathloss observation is Gaussian with a shared
noise scale; only the distance-conditioned mean differs. The likelihood
ratio test then reduces to comparing the observation against a scalar
threshold. Closed-form false-alarm and detection probabilities follow from
the Gaussian upper-tail function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channelsim import Dataset, LOS, NLOS, model_pathloss_db
from .plfit import PathlossParams

DECIDE_NLOS_ABOVE = "decide-NLOS-above"
DECIDE_NLOS_BELOW = "decide-NLOS-below"

PER_DISTANCE = "per-distance"
POOLED = "pooled"


class DegenerateHypothesesError(ValueError):
    """The two hypothesis means coincide; the test carries no information."""


def q_function(x):
    """Gaussian upper-tail probability Q(x) via the complementary error function."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * erfc(x / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def hypothesis_means(los: PathlossParams, nlos: PathlossParams,
                     distance: float, wav: float) -> tuple:
    """Model pathloss under each hypothesis at one distance: (m0, m1)."""
    return (model_pathloss_db(los, distance, wav),
            model_pathloss_db(nlos, distance, wav))


def llrt_threshold(m0: float, m1: float, sigma: float,
                   prior_los: float, prior_nlos: float) -> float:
    """Likelihood-ratio threshold on the observation.

    delta = sigma^2 * ln(prior_los/prior_nlos) / (m1 - m0) + (m0 + m1)/2,
    the midpoint under equal priors.
    """
    _check_priors(prior_los, prior_nlos)
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if m0 == m1:
        raise DegenerateHypothesesError("m0 == m1: threshold undefined")
    eta = prior_los / prior_nlos
    return sigma ** 2 * math.log(eta) / (m1 - m0) + (m0 + m1) / 2.0


def _check_priors(prior_los, prior_nlos):
    if not (prior_los > 0 and prior_nlos > 0):
        raise ValueError(f"priors must be positive, got ({prior_los}, {prior_nlos})")
    if not math.isclose(prior_los + prior_nlos, 1.0, rel_tol=0, abs_tol=1e-9):
        raise ValueError(f"priors must sum to 1, got {prior_los + prior_nlos}")


@dataclass(frozen=True)
class HypothesisPair:
    """Distance-conditioned test: means, shared sigma, priors, threshold."""

    m0: float
    m1: float
    sigma: float
    prior_los: float = 0.5
    prior_nlos: float = 0.5
    threshold_delta: float = float("nan")
    direction: str = ""

    def __post_init__(self):
        _check_priors(self.prior_los, self.prior_nlos)
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.m0 == self.m1:
            raise DegenerateHypothesesError("m0 == m1: degenerate hypothesis pair")
        expected = DECIDE_NLOS_ABOVE if self.m1 > self.m0 else DECIDE_NLOS_BELOW
        if self.direction and self.direction != expected:
            raise ValueError(f"direction {self.direction!r} inconsistent with means")

    @property
    def direction_sign(self) -> float:
        return 1.0 if self.direction == DECIDE_NLOS_ABOVE else -1.0


def make_pair(los: PathlossParams, nlos: PathlossParams, distance: float,
              wav: float, sigma: float, prior_los: float = 0.5,
              prior_nlos: float = 0.5) -> HypothesisPair:
    """Build the distance-conditioned test from per-scenario model parameters."""
    m0, m1 = hypothesis_means(los, nlos, distance, wav)
    if m0 == m1:
        raise DegenerateHypothesesError(f"means coincide at distance {distance}")
    delta = llrt_threshold(m0, m1, sigma, prior_los, prior_nlos)
    direction = DECIDE_NLOS_ABOVE if m1 > m0 else DECIDE_NLOS_BELOW
    return HypothesisPair(m0=m0, m1=m1, sigma=sigma, prior_los=prior_los,
                          prior_nlos=prior_nlos, threshold_delta=delta,
                          direction=direction)


def classify(z: float, pair: HypothesisPair) -> str:
    """Threshold decision; ties (z == delta) go to LOS."""
    if pair.direction == DECIDE_NLOS_ABOVE:
        return NLOS if z > pair.threshold_delta else LOS
    return NLOS if z < pair.threshold_delta else LOS


@dataclass(frozen=True)
class ErrorRates:
    pfa: float
    pd: float

    @property
    def pmd(self) -> float:
        return 1.0 - self.pd


def analytic_rates(pair: HypothesisPair) -> ErrorRates:
    """Closed-form false-alarm and detection probabilities at the pair's threshold."""
    sign = pair.direction_sign
    pfa = q_function(sign * (pair.threshold_delta - pair.m0) / pair.sigma)
    pd = q_function(sign * (pair.threshold_delta - pair.m1) / pair.sigma)
    return ErrorRates(pfa=pfa, pd=pd)


@dataclass
class BhtResult:
    """Batch classification output: decisions, ROC-ready scores, flags."""

    predictions: np.ndarray      # object array of LOS/NLOS (None where flagged)
    scores: np.ndarray           # (z - delta) * direction_sign, NaN where flagged
    flagged: np.ndarray          # bool; True where no usable pair existed
    pairs: dict                  # key (distance or "pooled") -> HypothesisPair
    threshold_mode: str

    @property
    def valid(self) -> np.ndarray:
        return ~self.flagged


def classify_dataset(dataset: Dataset, los: PathlossParams, nlos: PathlossParams,
                     sigma: float, priors: tuple = (0.5, 0.5), wav: float = None,
                     threshold_mode: str = PER_DISTANCE) -> BhtResult:
    """Classify every measurement with its distance-conditioned test.

    `per-distance` builds one pair per distinct distance; `pooled` uses a
    single pair at the dataset's mean regressor. Distances with coincident
    means are flagged and skipped rather than failing the batch.
    """
    if wav is None:
        raise ValueError("wavelength is required")
    if threshold_mode not in (PER_DISTANCE, POOLED):
        raise ValueError(f"threshold_mode must be {PER_DISTANCE!r} or {POOLED!r}")
    prior_los, prior_nlos = priors
    distances = dataset.column("distance")
    z = dataset.column("pathloss_db")
    n = len(dataset)

    predictions = np.empty(n, dtype=object)
    scores = np.full(n, np.nan)
    flagged = np.zeros(n, dtype=bool)
    pairs = {}

    if threshold_mode == POOLED:
        from .channelsim import regressor_db
        g_mean = float(np.mean(regressor_db(distances, wav)))
        m0 = los.intercept_A + los.exponent_alpha * g_mean
        m1 = nlos.intercept_A + nlos.exponent_alpha * g_mean
        if m0 == m1:
            flagged[:] = True
            return BhtResult(predictions, scores, flagged, pairs, threshold_mode)
        delta = llrt_threshold(m0, m1, sigma, prior_los, prior_nlos)
        pair = HypothesisPair(m0=m0, m1=m1, sigma=sigma, prior_los=prior_los,
                              prior_nlos=prior_nlos, threshold_delta=delta,
                              direction=DECIDE_NLOS_ABOVE if m1 > m0 else DECIDE_NLOS_BELOW)
        pairs["pooled"] = pair
        scores = (z - delta) * pair.direction_sign
        predictions[:] = np.where(scores > 0, NLOS, LOS)
        return BhtResult(predictions, scores, flagged, pairs, threshold_mode)

    for d in np.unique(distances):
        idx = distances == d
        try:
            pair = make_pair(los, nlos, float(d), wav, sigma, prior_los, prior_nlos)
        except DegenerateHypothesesError:
            flagged[idx] = True
            predictions[idx] = None
            continue
        pairs[float(d)] = pair
        s = (z[idx] - pair.threshold_delta) * pair.direction_sign
        scores[idx] = s
        predictions[idx] = np.where(s > 0, NLOS, LOS)
    return BhtResult(predictions, scores, flagged, pairs, threshold_mode)


DECISIONS_HEADER = "position_index,distance_m,pathloss_db,score,decision,truth"


def write_decisions_csv(dataset: Dataset, result: BhtResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(DECISIONS_HEADER + "\n")
        for i, m in enumerate(dataset.measurements):
            decision = result.predictions[i] if not result.flagged[i] else "NA"
            score = repr(float(result.scores[i])) if not result.flagged[i] else "NA"
            fh.write(f"{m.position_index},{float(m.distance)!r},{float(m.pathloss_db)!r},"
                     f"{score},{decision},{m.scenario}\n")
