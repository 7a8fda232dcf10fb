"""Trained-model container, prediction, selection, and JSON persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..channelsim import LOS, NLOS
from .discriminant import lda_score, qda_score, train_lda, train_qda
from .logreg import LogregConfig, train_logreg
from .splits import Standardizer
from .svm import rbf_decision, train_linear_svm, train_rbf_svm

KIND_LR = "LR"
KIND_LDA = "LDA"
KIND_QDA = "QDA"
KIND_LINEAR_SVM = "LinearSVM"
KIND_RBF_SVM = "RbfSVM"
ALL_KINDS = (KIND_LR, KIND_LDA, KIND_QDA, KIND_LINEAR_SVM, KIND_RBF_SVM)

MODEL_FORMAT = "nlosid-model"
MODEL_VERSION = 1


@dataclass
class ClassifierModel:
    kind: str
    params: dict
    standardizer: Standardizer
    train_config: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return len(self.standardizer.mean)


def decision_score(model: ClassifierModel, X: np.ndarray) -> np.ndarray:
    """Continuous score, oriented so larger means more NLOS-like."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    Xs = model.standardizer.apply(X)
    p = model.params
    if model.kind == KIND_LR:
        return Xs @ p["weights"] + p["bias"]
    if model.kind == KIND_LDA:
        return lda_score(p, Xs)
    if model.kind == KIND_QDA:
        return qda_score(p, Xs)
    if model.kind == KIND_LINEAR_SVM:
        return Xs @ p["weights"] + p["bias"]
    if model.kind == KIND_RBF_SVM:
        return rbf_decision(p, Xs)
    raise ValueError(f"unknown model kind {model.kind!r}")


def predict(model: ClassifierModel, X: np.ndarray) -> np.ndarray:
    """Class labels from the decision score; a score of exactly 0 maps to LOS."""
    scores = decision_score(model, X)
    return np.where(scores > 0, NLOS, LOS).astype(object)


def train_classifier(kind: str, X: np.ndarray, y: np.ndarray,
                     standardizer: Standardizer | None = None,
                     hyperparams: dict | None = None) -> ClassifierModel:
    """Standardize, train one classifier kind, and wrap it as a model.

    `y` holds -1/+1 labels (+1 = NLOS). When no standardizer is given, one
    is fitted on X (callers pass the train-split standardizer explicitly
    when X is not the training split).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    hp = dict(hyperparams or {})
    std = standardizer if standardizer is not None else Standardizer.fit(X)
    Xs = std.apply(X)

    if kind == KIND_LR:
        config = LogregConfig(step=hp.pop("step", 0.5), max_iter=hp.pop("max_iter", 2000))
        w, b, info = train_logreg(Xs, y, config)
        params = {"weights": w, "bias": b}
        hp.update(info)
    elif kind == KIND_LDA:
        params = train_lda(Xs, y)
    elif kind == KIND_QDA:
        params = train_qda(Xs, y)
    elif kind == KIND_LINEAR_SVM:
        C = hp.pop("C", 1.0)
        iters = hp.pop("iterations", 20000)
        w, b = train_linear_svm(Xs, y, C=C, iterations=iters)
        params = {"weights": w, "bias": b, "C": C}
        hp.update({"C": C, "iterations": iters})
    elif kind == KIND_RBF_SVM:
        C = hp.pop("C", 1.0)
        gamma = hp.pop("gamma", 1.0 / X.shape[1])
        params = train_rbf_svm(Xs, y, C=C, gamma=gamma,
                               tol=hp.pop("tol", 1e-3),
                               max_iter=hp.pop("max_iter", 200_000))
        hp.update({"C": C, "gamma": gamma})
    else:
        raise ValueError(f"unknown model kind {kind!r}")

    return ClassifierModel(kind=kind, params=params, standardizer=std,
                          train_config=hp)


def stratified_subsample(y: np.ndarray, cap_per_class: int, seed: int) -> np.ndarray:
    """Deterministic per-class subsample indices, at most cap per class."""
    rng = np.random.default_rng(seed)
    keep = []
    for cls in (-1.0, 1.0):
        idx = np.flatnonzero(np.asarray(y) == cls)
        if len(idx) > cap_per_class:
            idx = rng.choice(idx, size=cap_per_class, replace=False)
        keep.append(np.sort(idx))
    return np.concatenate(keep)


def select_and_train(kind: str, X_train, y_train, X_val, y_val,
                     grids: dict | None = None, subsample_seed: int = 0) -> ClassifierModel:
    """Grid-search hyperparameters on the validation split, then train.

    The RBF machine trains on a stratified subsample capped per class; the
    cap, grids, and the selected values are recorded in the model config.
    """
    grids = dict(grids or {})
    c_grid = grids.get("c_grid", (0.1, 1.0, 10.0))
    gamma_scale_grid = grids.get("gamma_scale_grid", (0.1, 1.0, 10.0))
    cap = int(grids.get("train_cap_per_class", 5000))
    dim = np.asarray(X_train).shape[1]

    std = Standardizer.fit(np.asarray(X_train, dtype=float))

    if kind in (KIND_LR, KIND_LDA, KIND_QDA):
        hp = {"step": grids.get("logreg_step", 0.5),
              "max_iter": int(grids.get("logreg_max_iter", 2000))} if kind == KIND_LR else {}
        return train_classifier(kind, X_train, y_train, standardizer=std, hyperparams=hp)

    if kind == KIND_LINEAR_SVM:
        candidates = [{"C": c, "iterations": int(grids.get("linear_svm_iterations", 20000))}
                      for c in c_grid]
    elif kind == KIND_RBF_SVM:
        candidates = [{"C": c, "gamma": gs / dim}
                      for c in c_grid for gs in gamma_scale_grid]
    else:
        raise ValueError(f"unknown model kind {kind!r}")

    X_fit, y_fit = np.asarray(X_train, dtype=float), np.asarray(y_train, dtype=float)
    if kind == KIND_RBF_SVM:
        keep = stratified_subsample(y_fit, cap, subsample_seed)
        X_fit, y_fit = X_fit[keep], y_fit[keep]

    best = None
    for hp in candidates:
        model = train_classifier(kind, X_fit, y_fit, standardizer=std, hyperparams=dict(hp))
        acc = float(np.mean(predict(model, X_val) == np.where(np.asarray(y_val) > 0, NLOS, LOS)))
        if best is None or acc > best[0]:
            best = (acc, model, hp)
    _, model, hp = best
    model.train_config["validation_accuracy"] = best[0]
    model.train_config["grid"] = {"c_grid": list(c_grid),
                                  "gamma_scale_grid": list(gamma_scale_grid)}
    if kind == KIND_RBF_SVM:
        model.train_config["train_cap_per_class"] = cap
    return model


# ---------------------------------------------------------------------------
# persistence


def _encode(value):
    if isinstance(value, np.ndarray):
        return {"__array__": value.tolist()}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _decode(value):
    if isinstance(value, dict):
        if "__array__" in value and len(value) == 1:
            return np.asarray(value["__array__"], dtype=float)
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


def save_model(model: ClassifierModel, path) -> None:
    doc = {"format": MODEL_FORMAT, "version": MODEL_VERSION, "kind": model.kind,
           "params": _encode(model.params),
           "standardizer": {"mean": model.standardizer.mean.tolist(),
                            "std": model.standardizer.std.tolist()},
           "train_config": _encode(model.train_config)}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path) -> ClassifierModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a model document")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {doc.get('version')}")
    std = Standardizer(mean=np.asarray(doc["standardizer"]["mean"], dtype=float),
                       std=np.asarray(doc["standardizer"]["std"], dtype=float))
    return ClassifierModel(kind=doc["kind"], params=_decode(doc["params"]),
                           standardizer=std, train_config=_decode(doc["train_config"]))
