"""Scikit-learn style front end so the boosting strategies compose with
pipelines, cross-validation and model selection from the wider ecosystem."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .core import ConfigError, Dataset, validate_features
from .boosting import FIXED_COST, StrategyConfig, train
from .evaluation import feature_importance
from .resample import train_rusboost, train_smoteboost

ESTIMATOR_STRATEGIES = tuple(sorted(FIXED_COST)) + (
    "adaboost", "adacc1", "adacc2", "adan_cc1", "adan_cc2", "rareboost",
    "rusboost", "smoteboost")


class BoostingClassifier(BaseEstimator, ClassifierMixin):
    """Binary cost-sensitive boosting classifier with decision stumps.

    Parameters
    ----------
    strategy : str, default="adacc1"
        Any training strategy id, plus "rusboost"/"smoteboost".
    n_rounds : int, default=100
        Maximum number of boosting rounds (T).
    cost_neg, cost_pos : float, optional
        Fixed per-class misclassification costs; required by the fixed-cost
        strategies and rejected by the parameter-free ones.
    k_neighbors : int, default=5
        SMOTE neighborhood size (smoteboost only).
    positive_label : object, optional
        Class treated as positive/minority; defaults to the rarer class.
    random_state : int, default=0
        Seed for the strategies that sample (rusboost, smoteboost).

    Attributes
    ----------
    ensemble_ : trained :class:`~boostcraft.core.Ensemble`
    classes_ : ndarray of the two class labels, sorted
    feature_importances_ : per-feature share of the total vote weight
    """

    def __init__(self, strategy="adacc1", n_rounds=100, cost_neg=None,
                 cost_pos=1.0, k_neighbors=5, positive_label=None,
                 random_state=0, record_diagnostics=False):
        self.strategy = strategy
        self.n_rounds = n_rounds
        self.cost_neg = cost_neg
        self.cost_pos = cost_pos
        self.k_neighbors = k_neighbors
        self.positive_label = positive_label
        self.random_state = random_state
        self.record_diagnostics = record_diagnostics

    def _resolve_positive(self, y):
        classes = np.unique(y)
        if classes.shape[0] != 2:
            raise ConfigError(
                f"binary classification only, got {classes.shape[0]} classes")
        if self.positive_label is not None:
            if self.positive_label not in classes:
                raise ConfigError(
                    f"positive_label {self.positive_label!r} not among classes")
            return classes, self.positive_label
        counts = [(np.sum(y == c), i) for i, c in enumerate(classes)]
        counts.sort()
        # tie on counts -> the later-sorting class is positive
        return classes, classes[counts[0][1]]

    def fit(self, X, y):
        X = validate_features(X)
        y = np.asarray(y)
        if y.shape[0] != X.shape[0]:
            raise ConfigError("X and y disagree on the number of rows")
        classes, positive = self._resolve_positive(y)
        internal = np.where(y == positive, 1, -1)
        dataset = Dataset(X, internal)

        if self.strategy == "rusboost":
            ensemble = train_rusboost(dataset, self.n_rounds, self.random_state,
                                      record_diagnostics=self.record_diagnostics)
        elif self.strategy == "smoteboost":
            ensemble = train_smoteboost(dataset, self.n_rounds,
                                        self.k_neighbors, self.random_state,
                                        record_diagnostics=self.record_diagnostics)
        else:
            costs = None
            if self.strategy in FIXED_COST:
                if self.cost_neg is None:
                    raise ConfigError(f"{self.strategy} requires cost_neg")
                costs = (self.cost_pos, self.cost_neg)
            elif self.cost_neg is not None:
                raise ConfigError(f"{self.strategy} rejects fixed costs")
            config = StrategyConfig(self.strategy, self.n_rounds,
                                    fixed_costs=costs, seed=self.random_state)
            ensemble = train(config, dataset,
                             record_diagnostics=self.record_diagnostics)

        self.classes_ = classes
        self.positive_class_ = positive
        self.negative_class_ = classes[0] if positive == classes[1] else classes[1]
        self.n_features_in_ = X.shape[1]
        self.ensemble_ = ensemble
        return self

    def decision_function(self, X):
        """Strategy decision score; positive means the positive class."""
        return self.ensemble_.decision_score(validate_features(X))

    def predict(self, X):
        score = self.decision_function(X)
        return np.where(score > 0, self.positive_class_, self.negative_class_)

    def predict_proba(self, X):
        """Column order follows ``classes_``. Calibrated strategies return
        the Platt probability; others rescale the vote margin into [0, 1]."""
        p_pos = self.ensemble_.probability(validate_features(X))
        proba = np.empty((p_pos.shape[0], 2))
        pos_col = int(np.flatnonzero(self.classes_ == self.positive_class_)[0])
        proba[:, pos_col] = p_pos
        proba[:, 1 - pos_col] = 1.0 - p_pos
        return proba

    @property
    def feature_importances_(self):
        return feature_importance(self.ensemble_)
