import numpy as np
import pytest

from boostcraft import Dataset, Stump


def random_dataset(rng, n_pos=15, n_neg=45, m=3, separation=1.0):
    """Two gaussian blobs with controllable overlap; +1 is the minority."""
    x_pos = rng.normal(separation, 1.0, size=(n_pos, m))
    x_neg = rng.normal(-separation, 1.0, size=(n_neg, m))
    features = np.vstack([x_pos, x_neg])
    labels = np.array([1] * n_pos + [-1] * n_neg)
    perm = rng.permutation(n_pos + n_neg)
    return Dataset(features[perm], labels[perm])


def brute_force_stump(features, weights, labels):
    """Independent exhaustive stump search: every (feature, threshold,
    polarity) candidate, canonical masked-sum error, lexicographic tie-break."""
    best_key = None
    best = None
    for j in range(features.shape[1]):
        values = np.unique(features[:, j])
        thresholds = [values[0] - 1.0]
        thresholds += [0.5 * (a + b) for a, b in zip(values[:-1], values[1:])]
        for threshold in thresholds:
            for polarity in (1, -1):
                pred = np.where(features[:, j] > threshold, polarity, -polarity)
                err = float(np.sum(weights[pred != labels]))
                key = (err, j, threshold, 0 if polarity == 1 else 1)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (Stump(j, threshold, polarity), err)
    return best


def brute_force_auc(scores, labels):
    pos = scores[np.asarray(labels) == 1]
    neg = scores[np.asarray(labels) == -1]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
