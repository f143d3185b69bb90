"""Core data model: datasets, weight vectors, stumps, ensembles, serialization.

Label convention: +1 is the positive/minority class, -1 the negative/majority
class. Every sign decision resolves ties to -1 (predict the majority class),
including margin evaluation inside the boosting loop. Alphas and all
accumulations are 64-bit floats.

Datasets and trained ensembles are effectively immutable (arrays are frozen)
and safe to share across threads or processes; weight vectors are owned by a
single training run.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

WEIGHT_SUM_TOL = 1e-9


class BoostcraftError(Exception):
    """Base class for package errors."""


class InvalidWeights(BoostcraftError):
    """Weight vector is all-zero, negative, or non-finite."""


class EmptyEnsemble(BoostcraftError):
    """Operation requires at least one trained member."""


class DimensionMismatch(BoostcraftError):
    """Inputs disagree on length or feature count."""


class ConfigError(BoostcraftError):
    """Invalid or inconsistent configuration."""


class TrainingDegenerate(BoostcraftError):
    """Continuation condition failed on the very first boosting round."""


class CalibrationFailed(BoostcraftError):
    """Sigmoid calibration did not converge."""


class MissingDiagnostics(BoostcraftError):
    """Per-round training diagnostics were not recorded."""


class UndefinedMetric(BoostcraftError):
    """Metric has an empty denominator (e.g. a class is absent)."""


class IngestError(BoostcraftError):
    """CSV ingestion failed."""


def sign(values):
    """Sign with sign(0) == -1. Returns an int array (or int for scalar input)."""
    arr = np.asarray(values)
    out = np.where(arr > 0, 1, -1)
    if arr.ndim == 0:
        return int(out)
    return out


def validate_features(features) -> np.ndarray:
    """Coerce to a 2-D float64 matrix of finite values."""
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"feature matrix must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("feature matrix contains NaN or infinite values")
    return arr


def validate_labels(labels, n: int) -> np.ndarray:
    """Coerce to an int64 vector of +/-1 values with both classes present."""
    arr = np.asarray(labels)
    if arr.shape != (n,):
        raise DimensionMismatch(f"labels must have shape ({n},), got {arr.shape}")
    arr = arr.astype(np.int64)
    values = set(np.unique(arr).tolist())
    if not values <= {-1, 1}:
        raise ValueError(f"labels must be +1/-1, got values {sorted(values)}")
    if values != {-1, 1}:
        raise ValueError("both classes must be present")
    return arr


class Dataset:
    """Immutable numeric feature matrix with +/-1 labels.

    The positive class (+1) is treated as the minority class throughout;
    ``minority_count`` is simply the number of positives.
    """

    __slots__ = ("features", "labels", "feature_names")

    def __init__(self, features, labels, feature_names=None):
        features = validate_features(features)
        n, m = features.shape
        if n < 2:
            raise ValueError("dataset needs at least 2 instances")
        if m < 1:
            raise ValueError("dataset needs at least 1 feature")
        labels = validate_labels(labels, n)
        if feature_names is None:
            feature_names = tuple(f"f{j}" for j in range(m))
        else:
            feature_names = tuple(str(name) for name in feature_names)
            if len(feature_names) != m:
                raise DimensionMismatch(
                    f"{len(feature_names)} feature names for {m} features"
                )
        features = np.ascontiguousarray(features)
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", feature_names)

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def minority_count(self) -> int:
        return int(np.sum(self.labels == 1))

    @property
    def majority_count(self) -> int:
        return int(np.sum(self.labels == -1))

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names)


def normalized(weights) -> np.ndarray:
    """Scale a non-negative vector to sum exactly to 1.

    Proportions are preserved; raises InvalidWeights for all-zero, negative,
    or non-finite input.
    """
    arr = np.asarray(weights, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidWeights("weights must be a non-empty 1-D vector")
    if not np.isfinite(arr).all():
        raise InvalidWeights("weights contain NaN or infinite entries")
    if (arr < 0).any():
        raise InvalidWeights("weights contain negative entries")
    total = float(arr.sum())
    if total <= 0.0:
        raise InvalidWeights("weights sum to zero")
    return arr / total


@dataclass(frozen=True)
class Stump:
    """Depth-1 decision rule: predict ``polarity`` when the feature exceeds
    the threshold, the opposite label otherwise (strict inequality)."""

    feature_index: int
    threshold: float
    polarity: int

    def predict(self, x):
        """Predict +/-1 for one feature vector or a matrix of rows."""
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if self.feature_index >= arr.shape[1]:
            raise DimensionMismatch(
                f"stump uses feature {self.feature_index}, input has {arr.shape[1]}"
            )
        preds = np.where(arr[:, self.feature_index] > self.threshold,
                         self.polarity, -self.polarity)
        return int(preds[0]) if single else preds


@dataclass(frozen=True)
class EnsembleMember:
    """One weak learner with its voting weight.

    ``alpha_neg`` is only set for RareBoost members, whose negative-side
    predictions vote with a separate weight.
    """

    stump: Stump
    alpha: float
    alpha_neg: float | None = None

    def vote(self, predictions) -> np.ndarray:
        """Signed score contribution of this member given its predictions."""
        predictions = np.asarray(predictions)
        if self.alpha_neg is None:
            return self.alpha * predictions
        weight = np.where(predictions > 0, self.alpha, self.alpha_neg)
        return weight * predictions

    @property
    def max_vote(self) -> float:
        return self.alpha if self.alpha_neg is None else max(self.alpha, self.alpha_neg)


class Ensemble:
    """Ordered weighted vote of stumps plus optional decision machinery.

    ``decision_shift`` holds per-class vote multipliers (c_pos, c_neg) for
    cost-shifted decisions; ``calibrator`` holds Platt sigmoid coefficients
    (A, B) mapping raw scores to probabilities 1 / (1 + exp(A*s + B)).
    ``diagnostics`` (per-round training records) is attached by the trainer
    and is never serialized.
    """

    def __init__(self, members, strategy_id, n_features,
                 decision_shift=None, calibrator=None, diagnostics=None):
        members = list(members)
        for member in members:
            if not (member.alpha > 0.0):
                raise ValueError("ensemble members must have alpha > 0")
            if member.alpha_neg is not None and not (member.alpha_neg > 0.0):
                raise ValueError("RareBoost members need both alphas > 0")
        self.members = members
        self.strategy_id = strategy_id
        self.n_features = int(n_features)
        self.decision_shift = None if decision_shift is None else (
            float(decision_shift[0]), float(decision_shift[1]))
        self.calibrator = None if calibrator is None else (
            float(calibrator[0]), float(calibrator[1]))
        self.diagnostics = diagnostics

    def __len__(self) -> int:
        return len(self.members)

    def _check_input(self, x) -> tuple[np.ndarray, bool]:
        if not self.members:
            raise EmptyEnsemble("ensemble has no members")
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"model expects {self.n_features} features, got {arr.shape[1]}")
        return arr, single

    def raw_score(self, x):
        """Weighted vote sum; RareBoost members vote with their side's alpha."""
        arr, single = self._check_input(x)
        score = np.zeros(arr.shape[0])
        for member in self.members:
            score += member.vote(member.stump.predict(arr))
        return float(score[0]) if single else score

    def decision_score(self, x):
        """Score whose sign (ties negative) gives the predicted label.

        Applies the decision shift and/or calibrator when present; for
        calibrated ensembles this is the decision probability minus 0.5.
        """
        arr, single = self._check_input(x)
        if self.calibrator is not None:
            score = self._probability(arr) - 0.5
        elif self.decision_shift is not None:
            score = self._shifted_score(arr)
        else:
            score = np.zeros(arr.shape[0])
            for member in self.members:
                score += member.vote(member.stump.predict(arr))
        return float(score[0]) if single else score

    def _shifted_score(self, arr) -> np.ndarray:
        c_pos, c_neg = self.decision_shift
        score = np.zeros(arr.shape[0])
        for member in self.members:
            preds = member.stump.predict(arr)
            score += np.where(preds > 0, c_pos, c_neg) * member.vote(preds)
        return score

    def _probability(self, arr) -> np.ndarray:
        a, b = self.calibrator
        raw = np.zeros(arr.shape[0])
        for member in self.members:
            raw += member.vote(member.stump.predict(arr))
        fapb = a * raw + b
        # numerically stable sigmoid 1 / (1 + exp(fapb))
        prob = np.where(fapb >= 0,
                        np.exp(-np.maximum(fapb, 0)) / (1.0 + np.exp(-np.abs(fapb))),
                        1.0 / (1.0 + np.exp(np.minimum(fapb, 0))))
        if self.decision_shift is not None:
            c_pos, c_neg = self.decision_shift
            denom = c_pos * prob + c_neg * (1.0 - prob)
            prob = np.divide(c_pos * prob, denom, out=np.full_like(prob, 0.5),
                             where=denom > 0)
        return prob

    def probability(self, x):
        """P(y = +1 | x). Calibrated when a sigmoid was fitted, otherwise the
        vote margin rescaled into [0, 1]."""
        arr, single = self._check_input(x)
        if self.calibrator is not None:
            prob = self._probability(arr)
        else:
            bound = self.vote_bound()
            if self.decision_shift is not None:
                score = self._shifted_score(arr)
                bound *= max(self.decision_shift)
            else:
                score = np.zeros(arr.shape[0])
                for member in self.members:
                    score += member.vote(member.stump.predict(arr))
            prob = np.clip((1.0 + score / bound) / 2.0, 0.0, 1.0)
        return float(prob[0]) if single else prob

    def predict(self, x):
        """Predicted label(s) in {+1, -1}; score ties go to -1."""
        score = self.decision_score(x)
        return sign(score)

    def vote_bound(self) -> float:
        """Upper bound on |raw_score| over any input: sum of max member votes."""
        if not self.members:
            raise EmptyEnsemble("ensemble has no members")
        return float(sum(member.max_vote for member in self.members))

    def to_dict(self) -> dict:
        doc = {
            "strategy_id": self.strategy_id,
            "n_features": self.n_features,
            "members": [
                {
                    "feature_index": member.stump.feature_index,
                    "threshold": member.stump.threshold,
                    "polarity": member.stump.polarity,
                    "alpha": member.alpha,
                    **({"alpha_neg": member.alpha_neg}
                       if member.alpha_neg is not None else {}),
                }
                for member in self.members
            ],
        }
        if self.decision_shift is not None:
            doc["decision_shift"] = list(self.decision_shift)
        if self.calibrator is not None:
            doc["calibrator"] = list(self.calibrator)
        return doc

    def to_json(self) -> str:
        # json round-trips Python floats exactly (shortest repr), so dump/load
        # is bit-exact for every stored field
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "Ensemble":
        members = [
            EnsembleMember(
                Stump(int(item["feature_index"]), float(item["threshold"]),
                      int(item["polarity"])),
                float(item["alpha"]),
                float(item["alpha_neg"]) if "alpha_neg" in item else None,
            )
            for item in doc["members"]
        ]
        return cls(members, doc["strategy_id"], doc["n_features"],
                   decision_shift=doc.get("decision_shift"),
                   calibrator=doc.get("calibrator"))

    @classmethod
    def from_json(cls, text: str) -> "Ensemble":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Ensemble":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def raw_score(ensemble: Ensemble, x):
    """Module-level alias for :meth:`Ensemble.raw_score`."""
    return ensemble.raw_score(x)


def predict_label(ensemble: Ensemble, x):
    """Module-level alias for :meth:`Ensemble.predict`."""
    return ensemble.predict(x)
