"""Imbalance-aware evaluation metrics: confusion counts, rate metrics, and a
rank-based AUC (Mann-Whitney with average ranks, ties count 0.5 per pair)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import DimensionMismatch, UndefinedMetric

METRIC_NAMES = ("tpr", "tnr", "balanced_accuracy", "f1", "gmean", "auc", "opm")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fn: int
    fp: int
    tn: int

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn


def confusion(predictions, labels) -> ConfusionCounts:
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape or predictions.size == 0:
        raise DimensionMismatch("predictions and labels must have equal length >= 1")
    pos = labels == 1
    pred_pos = predictions == 1
    return ConfusionCounts(
        tp=int(np.sum(pred_pos & pos)),
        fn=int(np.sum(~pred_pos & pos)),
        fp=int(np.sum(pred_pos & ~pos)),
        tn=int(np.sum(~pred_pos & ~pos)),
    )


def auc_score(scores, labels) -> float:
    """Probability a random positive outranks a random negative, computed
    from average ranks; equivalent to counting pairs with ties worth 0.5."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise DimensionMismatch("scores and labels must have equal length")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == -1))
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetric("AUC needs both classes present")
    ranks = rankdata(scores, method="average")
    pos_rank_sum = float(np.sum(ranks[labels == 1]))
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class MetricSuite:
    tpr: float
    tnr: float
    balanced_accuracy: float
    f1: float
    gmean: float
    auc: float
    opm: float

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def suite(counts: ConfusionCounts, scores, labels) -> MetricSuite:
    """Full metric suite from confusion counts plus confidence scores.

    f1 with tp = fp = fn = 0 is defined as 0. A class with no instances makes
    its rate (and the AUC) undefined; callers are expected to evaluate on
    splits containing both classes.
    """
    if counts.positives == 0:
        raise UndefinedMetric("TPR undefined: no positive instances")
    if counts.negatives == 0:
        raise UndefinedMetric("TNR undefined: no negative instances")
    tpr = counts.tp / counts.positives
    tnr = counts.tn / counts.negatives
    balanced_accuracy = 0.5 * (tpr + tnr)
    denom = 2 * counts.tp + counts.fp + counts.fn
    f1 = (2 * counts.tp / denom) if denom > 0 else 0.0
    gmean = math.sqrt(tpr * tnr)
    auc = auc_score(scores, labels)
    opm = (auc + balanced_accuracy + gmean + f1 + tpr + tnr) / 6.0
    return MetricSuite(tpr, tnr, balanced_accuracy, f1, gmean, auc, opm)
