"""Data-level balancing (random over/under-sampling, SMOTE) and the hybrid
boosting baselines that resample inside each round (RUSBoost, SMOTEBoost).

All methods target exact class balance. Synthetic SMOTE points interpolate
between a minority instance and one of its k nearest minority neighbors in
Euclidean distance on the numeric (post one-hot) feature space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (ConfigError, Dataset, Ensemble, EnsembleMember,
                   TrainingDegenerate, normalized)
from .boosting import (CumulativeTracker, RoundRecord, collect_round_stats,
                       compute_alpha, continuation_check, _update_factors)
from .stump import StumpSearcher

RESAMPLE_METHODS = ("ros", "rus", "smote")


@dataclass(frozen=True)
class ResampleConfig:
    method: str
    k_neighbors: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.method not in RESAMPLE_METHODS:
            raise ConfigError(f"unknown resampling method {self.method!r}")
        if self.k_neighbors < 1:
            raise ConfigError("k_neighbors must be >= 1")


def _minority_neighbor_table(x_min: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest minority neighbors of each minority point
    (self excluded, distance ties broken by index)."""
    diffs = x_min[:, None, :] - x_min[None, :, :]
    dists = np.sqrt(np.sum(diffs * diffs, axis=2))
    np.fill_diagonal(dists, np.inf)
    order = np.argsort(dists, axis=1, kind="stable")
    return order[:, :k]


def _smote_points(x_min: np.ndarray, count: int, k: int,
                  rng: np.random.Generator) -> np.ndarray:
    neighbors = _minority_neighbor_table(x_min, k)
    seeds = rng.integers(0, x_min.shape[0], size=count)
    picks = rng.integers(0, k, size=count)
    lam = rng.random(count)[:, None]
    base = x_min[seeds]
    chosen = x_min[neighbors[seeds, picks]]
    return base + lam * (chosen - base)


def resample(config: ResampleConfig, dataset: Dataset) -> Dataset:
    """Return a class-balanced copy of the dataset.

    ros duplicates uniformly drawn minority rows, rus drops uniformly drawn
    majority rows, smote appends synthetic minority points. Original rows are
    preserved exactly (ros/smote append after them; rus keeps original order).
    """
    rng = np.random.default_rng(config.seed)
    y = dataset.labels
    pos_idx = np.flatnonzero(y == 1)
    neg_idx = np.flatnonzero(y == -1)
    deficit = neg_idx.size - pos_idx.size
    if deficit < 0:
        raise ConfigError("positive class must be the minority "
                          f"({pos_idx.size} > {neg_idx.size})")
    if deficit == 0:
        return dataset

    if config.method == "ros":
        extra = rng.choice(pos_idx, size=deficit, replace=True)
        keep = np.concatenate([np.arange(dataset.n), extra])
        return dataset.subset(keep)
    if config.method == "rus":
        survivors = rng.choice(neg_idx, size=pos_idx.size, replace=False)
        keep = np.sort(np.concatenate([pos_idx, survivors]))
        return dataset.subset(keep)
    # smote
    if pos_idx.size <= config.k_neighbors:
        raise ConfigError(
            f"smote needs minority_count > k_neighbors "
            f"({pos_idx.size} <= {config.k_neighbors})")
    synth = _smote_points(dataset.features[pos_idx], deficit,
                          config.k_neighbors, rng)
    features = np.vstack([dataset.features, synth])
    labels = np.concatenate([y, np.ones(deficit, dtype=np.int64)])
    return Dataset(features, labels, dataset.feature_names)


def _adaboost_round(weights, preds, y, t):
    """Shared AdaBoost alpha/continuation arithmetic for the hybrid methods."""
    stats = collect_round_stats(weights, preds, y)
    if not continuation_check("adaboost", stats):
        if t == 1:
            raise TrainingDegenerate(
                f"continuation condition failed on round 1 "
                f"(weighted error {stats.wrong_mass:.6f})")
        return None, None, False
    alpha = compute_alpha("adaboost", stats)
    return alpha, stats, stats.wrong_mass == 0.0


def _finish(members, records, dataset, strategy_id, record_diagnostics):
    return Ensemble(members, strategy_id, dataset.m,
                    diagnostics=records if record_diagnostics else None)


def _log_round(records, t, alpha, z, weights, tracker, y):
    records.append(RoundRecord(
        round=t, alpha=alpha, z=z,
        minority_weight_mass=float(np.sum(weights[y == 1])),
        cum_fnr=tracker.fnr, cum_fpr=tracker.fpr,
        balanced_error=0.5 * (tracker.fnr + tracker.fpr)))


def train_rusboost(dataset: Dataset, rounds: int, seed: int = 0, *,
                   record_diagnostics: bool = True) -> Ensemble:
    """AdaBoost whose stump trains each round on a balanced undersample of
    the weighted data (majority drawn without replacement, proportional to
    current weights); alpha and the reweight use the full distribution."""
    rng = np.random.default_rng(seed)
    X, y = dataset.features, dataset.labels
    n = dataset.n
    pos_idx = np.flatnonzero(y == 1)
    neg_idx = np.flatnonzero(y == -1)
    if pos_idx.size > neg_idx.size:
        raise ConfigError("positive class must be the minority "
                          f"({pos_idx.size} > {neg_idx.size})")
    weights = np.full(n, 1.0 / n)
    tracker = CumulativeTracker(y)
    members: list[EnsembleMember] = []
    records: list[RoundRecord] = []
    if record_diagnostics:
        _log_round(records, 0, 0.0, 1.0, weights, tracker, y)

    for t in range(1, rounds + 1):
        w_neg = weights[neg_idx]
        picked = rng.choice(neg_idx, size=pos_idx.size, replace=False,
                            p=w_neg / w_neg.sum())
        sub = np.sort(np.concatenate([pos_idx, picked]))
        result = StumpSearcher(X[sub]).search(normalized(weights[sub]), y[sub])
        preds = result.stump.predict(X)

        alpha, stats, stop_after = _adaboost_round(weights, preds, y, t)
        if alpha is None:
            break
        member = EnsembleMember(result.stump, alpha)
        members.append(member)
        tracker.update(member.vote(preds))
        unnormalized = weights * _update_factors("adaboost", None, alpha,
                                                 preds, y, None)
        z = float(unnormalized.sum())
        weights = unnormalized / z
        if record_diagnostics:
            _log_round(records, t, alpha, z, weights, tracker, y)
        if stop_after:
            break
    return _finish(members, records, dataset, "rusboost", record_diagnostics)


def train_smoteboost(dataset: Dataset, rounds: int, k: int = 5, seed: int = 0,
                     *, record_diagnostics: bool = True) -> Ensemble:
    """AdaBoost whose stump trains each round on the data plus fresh SMOTE
    synthetics (to class balance). The synthetics share the minority class's
    current weight mass uniformly and are discarded before the reweight step,
    which runs on the original distribution.
    """
    X, y = dataset.features, dataset.labels
    n = dataset.n
    pos_idx = np.flatnonzero(y == 1)
    deficit = dataset.majority_count - dataset.minority_count
    if deficit > 0 and pos_idx.size <= k:
        raise ConfigError(
            f"smoteboost needs minority_count > k ({pos_idx.size} <= {k})")
    rng = np.random.default_rng(seed)
    x_min = X[pos_idx]
    weights = np.full(n, 1.0 / n)
    tracker = CumulativeTracker(y)
    members: list[EnsembleMember] = []
    records: list[RoundRecord] = []
    if record_diagnostics:
        _log_round(records, 0, 0.0, 1.0, weights, tracker, y)

    for t in range(1, rounds + 1):
        if deficit > 0:
            synth = _smote_points(x_min, deficit, k, rng)
            x_train = np.vstack([X, synth])
            y_train = np.concatenate([y, np.ones(deficit, dtype=np.int64)])
            # synthetics join at the minority's mean instance weight, so the
            # stump sees the minority mass scaled up to class balance
            minority_mass = float(np.sum(weights[pos_idx]))
            w_train = np.concatenate([
                weights, np.full(deficit, minority_mass / pos_idx.size)])
            w_train = w_train / w_train.sum()
        else:
            x_train, y_train, w_train = X, y, weights
        result = StumpSearcher(x_train).search(w_train, y_train)
        preds = result.stump.predict(X)

        alpha, stats, stop_after = _adaboost_round(weights, preds, y, t)
        if alpha is None:
            break
        member = EnsembleMember(result.stump, alpha)
        members.append(member)
        tracker.update(member.vote(preds))
        unnormalized = weights * _update_factors("adaboost", None, alpha,
                                                 preds, y, None)
        z = float(unnormalized.sum())
        weights = unnormalized / z
        if record_diagnostics:
            _log_round(records, t, alpha, z, weights, tracker, y)
        if stop_after:
            break
    return _finish(members, records, dataset, "smoteboost", record_diagnostics)
