"""Dataset splitting, feature extraction, and standardization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channelsim import Dataset, LOS, NLOS, regressor_db

FEATURE_1D = "1d"   # [pathloss_db]
FEATURE_2D = "2d"   # [pathloss_db, regressor_db(distance)]

SPLIT_NAMES = ("train", "validation", "test")


@dataclass(frozen=True)
class SplitIndices:
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        all_idx = np.concatenate([self.train, self.validation, self.test])
        if len(np.unique(all_idx)) != len(all_idx):
            raise ValueError("split index sets overlap")


def _largest_remainder(total: int, ratios) -> list:
    """Integer allocation of `total` seats proportional to `ratios`.

    Leftover seats go to the largest fractional remainders; ties break in
    favor of the earlier entry (train before validation before test).
    """
    exact = [total * r for r in ratios]
    counts = [int(np.floor(e)) for e in exact]
    remainders = [e - c for e, c in zip(exact, counts)]
    for _ in range(total - sum(counts)):
        i = int(np.argmax(remainders))
        counts[i] += 1
        remainders[i] = -1.0
    return counts


def split(labels_or_dataset, ratios=(0.70, 0.15, 0.15), seed: int = 0) -> SplitIndices:
    """Stratified shuffle-split into train/validation/test.

    Total split sizes come from largest-remainder rounding of the full
    dataset size; each class is then allocated so its per-split count stays
    within one sample of its overall proportion. Deterministic per seed.
    """
    if isinstance(labels_or_dataset, Dataset):
        labels = labels_or_dataset.column("scenario")
    else:
        labels = np.asarray(labels_or_dataset, dtype=object)
    if len(ratios) != 3 or not np.isclose(sum(ratios), 1.0):
        raise ValueError(f"ratios must be three values summing to 1, got {ratios}")
    n = len(labels)
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError(f"need samples from at least two classes, got {classes}")
    class_idx = {c: np.flatnonzero(labels == c) for c in classes}
    if any(len(v) == 0 for v in class_idx.values()):
        raise ValueError("every class needs at least one sample")

    totals = _largest_remainder(n, ratios)
    remaining = list(totals)
    rng = np.random.default_rng(seed)

    buckets = [[], [], []]
    for k, c in enumerate(classes):
        idx = class_idx[c].copy()
        rng.shuffle(idx)
        if k < len(classes) - 1:
            alloc = _largest_remainder(len(idx), [t / n for t in totals])
            alloc = [min(a, r) for a, r in zip(alloc, remaining)]
            # top up if the capacity clamp dropped seats
            short = len(idx) - sum(alloc)
            for s in range(3):
                while short > 0 and alloc[s] < remaining[s]:
                    alloc[s] += 1
                    short -= 1
        else:
            alloc = list(remaining)
        start = 0
        for s, a in enumerate(alloc):
            buckets[s].extend(idx[start:start + a])
            start += a
            remaining[s] -= a

    return SplitIndices(train=np.sort(np.asarray(buckets[0], dtype=int)),
                        validation=np.sort(np.asarray(buckets[1], dtype=int)),
                        test=np.sort(np.asarray(buckets[2], dtype=int)))


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    feature_mode: str


def featurize(measurement, feature_mode: str, wav: float) -> FeatureVector:
    """Features for one measurement: pathloss alone, or pathloss plus the
    distance regressor (mirroring the distance conditioning of the
    hypothesis test)."""
    if feature_mode == FEATURE_1D:
        values = np.asarray([measurement.pathloss_db], dtype=float)
    elif feature_mode == FEATURE_2D:
        values = np.asarray([measurement.pathloss_db,
                             regressor_db(measurement.distance, wav)], dtype=float)
    else:
        raise ValueError(f"feature_mode must be {FEATURE_1D!r} or {FEATURE_2D!r}, got {feature_mode!r}")
    return FeatureVector(values=values, feature_mode=feature_mode)


def featurize_dataset(dataset: Dataset, feature_mode: str, wav: float):
    """Feature matrix and +/-1 class vector (NLOS = +1) for a whole dataset."""
    pl = dataset.column("pathloss_db")
    if feature_mode == FEATURE_1D:
        X = pl[:, None].astype(float)
    elif feature_mode == FEATURE_2D:
        X = np.column_stack([pl, regressor_db(dataset.column("distance"), wav)])
    else:
        raise ValueError(f"feature_mode must be {FEATURE_1D!r} or {FEATURE_2D!r}, got {feature_mode!r}")
    y = np.where(dataset.column("scenario") == NLOS, 1.0, -1.0)
    return X, y


@dataclass(frozen=True)
class Standardizer:
    """Per-feature affine map learned on the training split only."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (X - self.mean) / self.std

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        if np.any(std <= 0):
            bad = np.flatnonzero(std <= 0)
            raise ValueError(f"features {bad.tolist()} are constant on the training split")
        return cls(mean=mean, std=std)

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(mean=np.zeros(dim), std=np.ones(dim))
