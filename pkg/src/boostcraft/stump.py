"""Weighted decision-stump training.

The search enumerates, per feature, the midpoints between consecutive distinct
sorted values plus one sentinel below the minimum ("always one side"), for both
polarities, and returns the candidate with the lowest weighted 0/1 error.
Ties break on (error, feature index, threshold, polarity +1 first) so results
are reproducible across platforms and scan orders.

A fast prefix-sum scan ranks candidates; the survivors are re-scored with the
canonical masked sum so the reported error is exactly what a naive candidate
enumeration would compute.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, DimensionMismatch, InvalidWeights, Stump

# prefix sums drift from the canonical masked sum by at most ~n ulps, far
# below this margin, so the exact best candidate always survives the scan
_COLLECT_EPS = 1e-9


@dataclass(frozen=True)
class StumpSearchResult:
    stump: Stump
    weighted_error: float


def exact_weighted_error(stump: Stump, features, weights, labels) -> float:
    """Canonical weighted 0/1 error: sum of weights over misclassified rows."""
    preds = stump.predict(features)
    return float(np.sum(weights[preds != labels]))


class StumpSearcher:
    """Reusable candidate index for repeated searches over one feature matrix.

    Sort orders and threshold candidates depend only on the features, so a
    boosting run builds this once and re-scans with fresh weights each round.
    """

    def __init__(self, features):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise DimensionMismatch("feature matrix must be 2-D")
        self.features = features
        n, m = features.shape
        self.order = np.argsort(features, axis=0, kind="stable")
        sorted_x = np.take_along_axis(features, self.order, axis=0)
        # a split after sorted row p is valid only between distinct values,
        # so equal values never straddle a threshold
        self.valid = np.zeros((n, m), dtype=bool)
        self.valid[:-1] = sorted_x[:-1] < sorted_x[1:]
        self.midpoints = np.full((n, m), np.nan)
        self.midpoints[:-1] = 0.5 * (sorted_x[:-1] + sorted_x[1:])
        self.sentinels = sorted_x[0] - 1.0

    def search(self, weights, labels) -> StumpSearchResult:
        weights = np.asarray(weights, dtype=np.float64)
        labels = np.asarray(labels)
        n, m = self.features.shape
        if weights.shape != (n,) or labels.shape != (n,):
            raise DimensionMismatch("weights/labels do not match the feature matrix")
        if not np.isfinite(weights).all() or (weights < 0).any():
            raise InvalidWeights("weights must be finite and non-negative")
        if not (weights > 0).any():
            raise InvalidWeights("weights sum to zero")

        w_pos = np.where(labels == 1, weights, 0.0)
        w_neg = np.where(labels == -1, weights, 0.0)
        total_pos = w_pos.sum()
        total_neg = w_neg.sum()
        cum_pos = np.cumsum(w_pos[self.order], axis=0)
        cum_neg = np.cumsum(w_neg[self.order], axis=0)

        # polarity +1 predicts +1 strictly above the threshold, so it errs on
        # positives at or below the split and negatives above it
        err_plus = cum_pos + (total_neg - cum_neg)
        err_minus = cum_neg + (total_pos - cum_pos)
        err_plus[~self.valid] = np.inf
        err_minus[~self.valid] = np.inf

        best_scan = min(err_plus.min(), err_minus.min(), total_neg, total_pos)
        cutoff = best_scan + _COLLECT_EPS

        candidates = []
        for polarity, errs in ((1, err_plus), (-1, err_minus)):
            rows, cols = np.nonzero(errs <= cutoff)
            for p, j in zip(rows.tolist(), cols.tolist()):
                candidates.append((int(j), float(self.midpoints[p, j]), polarity))
        # all sentinel candidates of one polarity predict identically, so the
        # feature-0 sentinel always wins their tie-break
        if total_neg <= cutoff:
            candidates.append((0, float(self.sentinels[0]), 1))
        if total_pos <= cutoff:
            candidates.append((0, float(self.sentinels[0]), -1))

        best_key = None
        best = None
        for feature, threshold, polarity in candidates:
            stump = Stump(feature, threshold, polarity)
            err = exact_weighted_error(stump, self.features, weights, labels)
            key = (err, feature, threshold, 0 if polarity == 1 else 1)
            if best_key is None or key < best_key:
                best_key = key
                best = StumpSearchResult(stump, err)
        return best


def train_stump(dataset: Dataset, weights) -> StumpSearchResult:
    """Best stump over all (feature, threshold, polarity) candidates."""
    return StumpSearcher(dataset.features).search(weights, dataset.labels)


def predict_stump(stump: Stump, x):
    """Module-level alias for :meth:`Stump.predict`."""
    return stump.predict(x)
