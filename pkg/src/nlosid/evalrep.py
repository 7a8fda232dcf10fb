"""Evaluation metrics and report assembly.

Confusion counts treat NLOS as the positive class. Three accuracy variants
are always reported side by side because they genuinely differ:
  - rate_accuracy   = (1 - (pmd + pfa)) * 100, a rate-sum score that can go
                      negative and double-counts balanced errors;
  - standard_accuracy = correct / total * 100;
  - balanced_accuracy = (1 - (pmd + pfa)/2) * 100 = mean of tpr and tnr.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channelsim import LOS, NLOS


@dataclass(frozen=True)
class ConfusionStats:
    """Counts with NLOS as the positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def pfa(self) -> float | None:
        denom = self.fp + self.tn
        return self.fp / denom if denom else None

    @property
    def pmd(self) -> float | None:
        denom = self.fn + self.tp
        return self.fn / denom if denom else None


def confusion(truth, predicted) -> ConfusionStats:
    """Exact confusion counts from two equal-length label sequences."""
    truth = np.asarray(truth, dtype=object)
    predicted = np.asarray(predicted, dtype=object)
    if len(truth) != len(predicted):
        raise ValueError(f"length mismatch: {len(truth)} truths vs {len(predicted)} predictions")
    if len(truth) == 0:
        raise ValueError("empty label sequences")
    pos_t = truth == NLOS
    pos_p = predicted == NLOS
    return ConfusionStats(tp=int(np.sum(pos_t & pos_p)),
                          fp=int(np.sum(~pos_t & pos_p)),
                          tn=int(np.sum(~pos_t & ~pos_p)),
                          fn=int(np.sum(pos_t & ~pos_p)))


def accuracy_metrics(stats: ConfusionStats) -> dict:
    """All three accuracy variants, or None when a class is absent."""
    pfa, pmd = stats.pfa, stats.pmd
    if pfa is None or pmd is None:
        return {"rate_accuracy": None, "standard_accuracy": None,
                "balanced_accuracy": None}
    return {"rate_accuracy": (1.0 - (pmd + pfa)) * 100.0,
            "standard_accuracy": (stats.tp + stats.tn) / stats.total * 100.0,
            "balanced_accuracy": (1.0 - (pmd + pfa) / 2.0) * 100.0}


@dataclass(frozen=True)
class RocCurve:
    points: np.ndarray  # shape (k, 2), columns fpr, tpr
    auc: float

    def __post_init__(self):
        p = self.points
        if not (np.allclose(p[0], [0.0, 0.0]) and np.allclose(p[-1], [1.0, 1.0])):
            raise ValueError("ROC must run from (0,0) to (1,1)")
        if np.any(np.diff(p[:, 0]) < 0) or np.any(np.diff(p[:, 1]) < 0):
            raise ValueError("ROC coordinates must be nondecreasing")


def roc(scores, truth) -> RocCurve:
    """Threshold-sweep ROC with tied scores grouped into single steps.

    Scores must be oriented so larger means more NLOS-like. The area is the
    trapezoidal integral of the swept curve, which equals the pairwise
    ranking probability with ties counted half.
    """
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth, dtype=object)
    if len(scores) != len(truth):
        raise ValueError("scores and truth must have equal length")
    pos = truth == NLOS
    n_pos = int(pos.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = pos[order].astype(int)
    # group boundaries: last index of each tie block
    block_end = np.flatnonzero(np.diff(sorted_scores) != 0)
    block_end = np.append(block_end, len(scores) - 1)
    cum_tp = np.cumsum(sorted_pos)[block_end]
    cum_fp = (block_end + 1) - cum_tp

    tpr = np.concatenate([[0.0], cum_tp / n_pos])
    fpr = np.concatenate([[0.0], cum_fp / n_neg])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(points=np.column_stack([fpr, tpr]), auc=auc)


ROC_HEADER = "fpr,tpr"


def write_roc_csv(curve: RocCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ROC_HEADER + "\n")
        for f, t in curve.points:
            fh.write(f"{float(f)!r},{float(t)!r}\n")


# ---------------------------------------------------------------------------
# Table-shaped report

REPORT_HEADER = ("method,snr_level,pfa,pmd,paper_accuracy,standard_accuracy,"
                 "balanced_accuracy,auc")

METHOD_ORDER = ("BHT", "LR", "LDA", "QDA", "LinearSVM", "RbfSVM")


@dataclass
class MethodEvaluation:
    """One method's test-split result at one SNR level."""

    method: str
    snr_level: str
    stats: ConfusionStats | None = None
    auc: float | None = None
    analytic_pfa: float | None = None
    analytic_pmd: float | None = None


def _cell(value) -> str:
    return "NA" if value is None else repr(float(value))


@dataclass
class ReportTable:
    entries: list

    def _sorted(self):
        def key(e):
            m = METHOD_ORDER.index(e.method) if e.method in METHOD_ORDER else len(METHOD_ORDER)
            return (e.snr_level, m, e.method)
        return sorted(self.entries, key=key)

    def to_csv(self) -> str:
        lines = [REPORT_HEADER]
        for e in self._sorted():
            pfa = e.stats.pfa if e.stats else None
            pmd = e.stats.pmd if e.stats else None
            acc = accuracy_metrics(e.stats) if e.stats else {
                "rate_accuracy": None, "standard_accuracy": None, "balanced_accuracy": None}
            lines.append(",".join([e.method, e.snr_level, _cell(pfa), _cell(pmd),
                                   _cell(acc["rate_accuracy"]),
                                   _cell(acc["standard_accuracy"]),
                                   _cell(acc["balanced_accuracy"]), _cell(e.auc)]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        cols = ["method", "snr", "pfa", "pmd", "acc(rate)", "acc(std)", "acc(bal)", "auc"]
        rows = [cols]
        notes = []
        for e in self._sorted():
            pfa = e.stats.pfa if e.stats else None
            pmd = e.stats.pmd if e.stats else None
            acc = accuracy_metrics(e.stats) if e.stats else {
                "rate_accuracy": None, "standard_accuracy": None, "balanced_accuracy": None}

            def f(v, nd=4):
                return "NA" if v is None else f"{v:.{nd}f}"

            rows.append([e.method, e.snr_level, f(pfa), f(pmd),
                         f(acc["rate_accuracy"], 2), f(acc["standard_accuracy"], 2),
                         f(acc["balanced_accuracy"], 2), f(e.auc)])
            if e.analytic_pfa is not None:
                notes.append(f"{e.method}/{e.snr_level}: analytic pfa={e.analytic_pfa:.4f} "
                             f"pmd={e.analytic_pmd:.4f} "
                             f"(empirical pfa={f(pfa)} pmd={f(pmd)})")
        widths = [max(len(r[i]) for r in rows) for i in range(len(cols))]
        out = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        out.append("")
        out.append("accuracy definitions: rate = (1-(pmd+pfa))*100 (can be negative), "
                   "std = correct/total*100, bal = (1-(pmd+pfa)/2)*100")
        if notes:
            out.append("")
            out.append("threshold-test closed-form rates:")
            out.extend("  " + n for n in notes)
        return "\n".join(out) + "\n"


def report(entries: list) -> ReportTable:
    """Assemble the per-method, per-SNR result table; gaps stay visible as NA."""
    return ReportTable(entries=list(entries))
