"""Boosting engine and the full reweighting-strategy family.

All strategies share one round skeleton: train a stump on the current
distribution, compute the strategy's alpha, check its continuation condition,
append the member, update the instance weights, renormalize. They differ in
weight initialization, the alpha formula, the multiplicative update, and the
decision rule; the cumulative strategies (adacc1/adacc2) additionally maintain
a running margin vector so the partial ensemble's class error rates can steer
per-instance costs without re-predicting earlier members.

Cost regimes:

* cumulative: per-instance costs in [1, 2]; on each round only instances the
  current stump misclassified, and only on the class currently served worse by
  the partial ensemble, get a cost above 1 (1 + that class's cumulative error
  rate).  The running rates feeding a round's alpha come from the members
  accepted so far; the weight update then uses rates that include the round's
  own member.
* fixed: a per-class pair (cost_pos, cost_neg) with cost_pos >= cost_neg > 0,
  supplied by the caller (usually grid-searched).

Strategy identifiers:
    adaboost, adacc1, adacc2, adan_cc1, adan_cc2, cgada, cgada_cal, adamec,
    adamec_cal, rareboost, csb1, csb2, adacost, adac1, adac2, adac3
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import (CalibrationFailed, ConfigError, Dataset, Ensemble,
                   EnsembleMember, MissingDiagnostics, TrainingDegenerate,
                   normalized, sign)
from .stump import StumpSearcher

STRATEGY_IDS = (
    "adaboost", "adacc1", "adacc2", "adan_cc1", "adan_cc2", "cgada",
    "cgada_cal", "adamec", "adamec_cal", "rareboost", "csb1", "csb2",
    "adacost", "adac1", "adac2", "adac3",
)
PARAMETER_FREE = frozenset(
    {"adaboost", "adacc1", "adacc2", "adan_cc1", "adan_cc2", "rareboost"})
FIXED_COST = frozenset(STRATEGY_IDS) - PARAMETER_FREE
# strategies whose first distribution is proportional to the fixed costs
COST_INITIALIZED = frozenset(
    {"cgada", "cgada_cal", "csb1", "csb2", "adacost", "adac1", "adac2", "adac3"})
CUMULATIVE = frozenset({"adacc1", "adacc2"})
PER_LEARNER_COST = frozenset({"adan_cc1", "adan_cc2"})
CALIBRATED = frozenset({"cgada_cal", "adamec_cal"})
SHIFTED = frozenset({"adamec", "adamec_cal"})

# the cost-shifted/calibrated variants train exactly like their base method
_LOOP_ID = {"adamec": "adaboost", "adamec_cal": "adaboost", "cgada_cal": "cgada"}

_ALPHA_FAMILY = {
    "adaboost": "plain", "cgada": "plain", "csb1": "plain", "csb2": "plain",
    "adacc1": "c1", "adan_cc1": "c1", "adac1": "c1",
    "adacc2": "c2", "adan_cc2": "c2", "adac2": "c2",
    "adac3": "c3", "adacost": "adacost", "rareboost": "rareboost",
}
_UPDATE_FAMILY = {
    "adaboost": "exp", "cgada": "exp",
    "adacc1": "cost_in_exp", "adan_cc1": "cost_in_exp", "adac1": "cost_in_exp",
    "adacc2": "cost_outside", "adan_cc2": "cost_outside", "adac2": "cost_outside",
    "csb2": "cost_outside",
    "csb1": "cost_outside_no_alpha",
    "adacost": "beta_exp",
    "adac3": "cost_in_and_out",
    "rareboost": "rareboost",
}

# clamp for zero "wrong" masses so a perfect round yields a large finite alpha
_MIN_MASS = 1e-10


@dataclass(frozen=True)
class StrategyConfig:
    """Training configuration: strategy, number of rounds T, optional fixed
    per-class costs (cost_pos, cost_neg), and a seed for reproducibility."""

    strategy_id: str
    rounds: int
    fixed_costs: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.strategy_id not in STRATEGY_IDS:
            raise ConfigError(f"unknown strategy {self.strategy_id!r}")
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.strategy_id in PARAMETER_FREE and self.fixed_costs is not None:
            raise ConfigError(
                f"{self.strategy_id} is parameter-free and rejects fixed costs")
        if self.strategy_id in FIXED_COST:
            if self.fixed_costs is None:
                raise ConfigError(f"{self.strategy_id} requires fixed costs")
            cost_pos, cost_neg = self.fixed_costs
            if not (cost_pos >= cost_neg > 0):
                raise ConfigError(
                    "fixed costs must satisfy cost_pos >= cost_neg > 0, "
                    f"got ({cost_pos}, {cost_neg})")


def fixed_cost_vector(labels, costs: tuple[float, float]) -> np.ndarray:
    """Per-instance costs from a per-class (cost_pos, cost_neg) pair."""
    cost_pos, cost_neg = costs
    return np.where(np.asarray(labels) == 1, float(cost_pos), float(cost_neg))


class CumulativeTracker:
    """Running margin of the partial ensemble plus its class error rates.

    ``margin[i]`` accumulates each accepted member's signed vote on instance
    i, so the false negative/positive rates of the partial ensemble cost O(n)
    per round instead of re-predicting every earlier member.  Margin ties
    count as a negative prediction.
    """

    def __init__(self, labels):
        labels = np.asarray(labels)
        self.pos_mask = labels == 1
        self.neg_mask = ~self.pos_mask
        self.n_pos = int(self.pos_mask.sum())
        self.n_neg = int(self.neg_mask.sum())
        self.margin = np.zeros(labels.shape[0])
        self.rounds = 0
        self.fnr = 1.0  # the empty margin predicts all-negative
        self.fpr = 0.0

    def update(self, contribution) -> None:
        """Add one member's signed vote contribution and refresh the rates."""
        self.margin += contribution
        self.rounds += 1
        predicted_pos = self.margin > 0
        self.fnr = float(np.sum(~predicted_pos & self.pos_mask)) / self.n_pos
        self.fpr = float(np.sum(predicted_pos & self.neg_mask)) / self.n_neg

    def rates(self) -> tuple[float, float]:
        return self.fnr, self.fpr

    def costs(self, miss_mask) -> np.ndarray:
        """Per-instance costs: 1 + the losing class's cumulative rate on the
        instances ``miss_mask`` flags, 1 elsewhere.

        Before any member is accepted there is no error signal and every cost
        is 1.  When the rates tie, no class is boosted.
        """
        n = self.margin.shape[0]
        costs = np.ones(n)
        if self.rounds == 0:
            return costs
        if self.fnr > self.fpr:
            costs[miss_mask & self.pos_mask] = 1.0 + self.fnr
        elif self.fpr > self.fnr:
            costs[miss_mask & self.neg_mask] = 1.0 + self.fpr
        return costs


def update_cumulative_costs(tracker: CumulativeTracker, alpha: float,
                            predictions, labels) -> np.ndarray:
    """Fold the just-accepted member into the tracker and return the costs
    for the weight update (misclassification judged by that member alone)."""
    predictions = np.asarray(predictions)
    tracker.update(alpha * predictions)
    return tracker.costs(predictions != np.asarray(labels))


def per_learner_costs(predictions, labels) -> np.ndarray:
    """Non-cumulative variant: rates come from the current learner alone."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    pos_mask = labels == 1
    neg_mask = ~pos_mask
    miss = predictions != labels
    fnr = float(np.sum(miss & pos_mask)) / int(pos_mask.sum())
    fpr = float(np.sum(miss & neg_mask)) / int(neg_mask.sum())
    costs = np.ones(labels.shape[0])
    if fnr > fpr:
        costs[miss & pos_mask] = 1.0 + fnr
    elif fpr > fnr:
        costs[miss & neg_mask] = 1.0 + fpr
    return costs


@dataclass(frozen=True)
class RoundStats:
    """Weight masses of one round, the inputs of every alpha formula."""

    correct_mass: float
    wrong_mass: float
    cost_correct_mass: float | None = None
    cost_wrong_mass: float | None = None
    cost_total_mass: float | None = None
    cost2_correct_mass: float | None = None
    cost2_wrong_mass: float | None = None
    beta_signed_sum: float | None = None
    tp_mass: float = 0.0
    fp_mass: float = 0.0
    tn_mass: float = 0.0
    fn_mass: float = 0.0


def adacost_betas(costs, miss_mask) -> np.ndarray:
    """AdaCost beta_2 adjustment: 0.5*(1 + c) for misclassified instances,
    0.5*(1 - c) for correct ones, with costs rescaled into [0, 1]."""
    costs = np.asarray(costs, dtype=np.float64)
    scaled = costs / costs.max()
    return np.where(miss_mask, 0.5 * (1.0 + scaled), 0.5 * (1.0 - scaled))


def collect_round_stats(weights, predictions, labels, costs=None,
                        betas=None) -> RoundStats:
    weights = np.asarray(weights, dtype=np.float64)
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    correct = predictions == labels
    wrong = ~correct
    pos_pred = predictions == 1
    stats = {
        "correct_mass": float(np.sum(weights[correct])),
        "wrong_mass": float(np.sum(weights[wrong])),
        "tp_mass": float(np.sum(weights[pos_pred & (labels == 1)])),
        "fp_mass": float(np.sum(weights[pos_pred & (labels == -1)])),
        "tn_mass": float(np.sum(weights[~pos_pred & (labels == -1)])),
        "fn_mass": float(np.sum(weights[~pos_pred & (labels == 1)])),
    }
    if costs is not None:
        costs = np.asarray(costs, dtype=np.float64)
        cw = weights * costs
        stats["cost_correct_mass"] = float(np.sum(cw[correct]))
        stats["cost_wrong_mass"] = float(np.sum(cw[wrong]))
        stats["cost_total_mass"] = float(np.sum(cw))
        c2w = cw * costs
        stats["cost2_correct_mass"] = float(np.sum(c2w[correct]))
        stats["cost2_wrong_mass"] = float(np.sum(c2w[wrong]))
    if betas is not None:
        signed = np.where(correct, 1.0, -1.0)
        stats["beta_signed_sum"] = float(np.sum(weights * signed * betas))
    return RoundStats(**stats)


def _half_log(numerator: float, denominator: float) -> float:
    if numerator <= 0.0:
        return -math.inf
    return 0.5 * math.log(numerator / max(denominator, _MIN_MASS))


def compute_alpha(strategy_id: str, stats: RoundStats):
    """Alpha of one round. RareBoost returns (alpha_pos, alpha_neg); all
    other strategies return a float. A non-positive result signals that the
    continuation condition failed (never a crash)."""
    family = _ALPHA_FAMILY[_LOOP_ID.get(strategy_id, strategy_id)]
    if family == "plain":
        return _half_log(stats.correct_mass, stats.wrong_mass)
    if family == "c1":
        r = stats.cost_correct_mass - stats.cost_wrong_mass
        return _half_log(1.0 + r, 1.0 - r)
    if family == "c2":
        return _half_log(stats.cost_correct_mass, stats.cost_wrong_mass)
    if family == "c3":
        r = stats.cost2_correct_mass - stats.cost2_wrong_mass
        return _half_log(stats.cost_total_mass + r, stats.cost_total_mass - r)
    if family == "adacost":
        r = stats.beta_signed_sum
        return _half_log(1.0 + r, 1.0 - r)
    # rareboost: one weight for positive predictions, one for negative
    return (_half_log(stats.tp_mass, stats.fp_mass),
            _half_log(stats.tn_mass, stats.fn_mass))


def continuation_check(strategy_id: str, stats: RoundStats) -> bool:
    """True when the round may proceed (the strategy's alpha stays positive)."""
    family = _ALPHA_FAMILY[_LOOP_ID.get(strategy_id, strategy_id)]
    if family == "plain":
        return stats.correct_mass > stats.wrong_mass
    if family in ("c1", "c2"):
        return stats.cost_correct_mass > stats.cost_wrong_mass
    if family == "c3":
        return stats.cost2_correct_mass > stats.cost2_wrong_mass
    if family == "adacost":
        return stats.beta_signed_sum > 0.0
    return stats.tp_mass > stats.fp_mass and stats.tn_mass > stats.fn_mass


def _update_factors(strategy_id, costs, alpha, predictions, labels, betas):
    yh = (predictions * labels).astype(np.float64)
    family = _UPDATE_FAMILY[_LOOP_ID.get(strategy_id, strategy_id)]
    if family == "exp":
        return np.exp(-alpha * yh)
    if family == "cost_in_exp":
        return np.exp(-costs * alpha * yh)
    if family == "cost_outside":
        return costs * np.exp(-alpha * yh)
    if family == "cost_outside_no_alpha":
        return costs * np.exp(-yh)
    if family == "beta_exp":
        return np.exp(-alpha * yh * betas)
    if family == "cost_in_and_out":
        return costs * np.exp(-costs * alpha * yh)
    alpha_pos, alpha_neg = alpha
    per_instance = np.where(predictions > 0, alpha_pos, alpha_neg)
    return np.exp(-per_instance * yh)


def reweight(strategy_id: str, weights, costs, alpha, predictions,
             labels) -> np.ndarray:
    """Apply the strategy's multiplicative update and renormalize."""
    weights = np.asarray(weights, dtype=np.float64)
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    betas = None
    if _LOOP_ID.get(strategy_id, strategy_id) == "adacost":
        betas = adacost_betas(costs, predictions != labels)
    factors = _update_factors(strategy_id, costs, alpha, predictions, labels,
                              betas)
    return normalized(weights * factors)


@dataclass(frozen=True)
class RoundRecord:
    """Per-round diagnostics. Round 0 describes the initial distribution;
    rounds are otherwise 1-indexed. ``balanced_error`` is the partial
    ensemble's (fnr + fpr) / 2 on the training set."""

    round: int
    alpha: float
    z: float
    minority_weight_mass: float
    cum_fnr: float
    cum_fpr: float
    balanced_error: float


DIAGNOSTICS_COLUMNS = ("round", "alpha", "Z", "minority_weight_mass",
                       "cum_fnr", "cum_fpr", "balanced_error")


def write_diagnostics_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(DIAGNOSTICS_COLUMNS)
        for rec in records:
            writer.writerow([rec.round, repr(rec.alpha), repr(rec.z),
                             repr(rec.minority_weight_mass), repr(rec.cum_fnr),
                             repr(rec.cum_fpr), repr(rec.balanced_error)])


def read_diagnostics_csv(path) -> list[RoundRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            records.append(RoundRecord(
                round=int(row["round"]), alpha=float(row["alpha"]),
                z=float(row["Z"]),
                minority_weight_mass=float(row["minority_weight_mass"]),
                cum_fnr=float(row["cum_fnr"]), cum_fpr=float(row["cum_fpr"]),
                balanced_error=float(row["balanced_error"])))
    if not records:
        raise MissingDiagnostics(f"no diagnostics rows in {path}")
    return records


def _rareboost_stop_after(stats: RoundStats) -> bool:
    # a perfect side would give an unbounded alpha next time the same stump
    # is picked; clamp this round's alpha, keep the member, and stop
    return stats.fp_mass == 0.0 or stats.fn_mass == 0.0


def train(config: StrategyConfig, dataset: Dataset, *,
          record_diagnostics: bool = True,
          force_unit_costs: bool = False,
          weight_trace: list | None = None) -> Ensemble:
    """Run up to ``config.rounds`` boosting rounds and return the ensemble.

    Training stops early when the strategy's continuation condition fails
    (TrainingDegenerate if that happens on round 1) or after a round whose
    stump made no weighted error.  ``force_unit_costs`` pins every cumulative
    or per-learner cost to 1, which reduces adacc1/adacc2 (and their
    non-cumulative variants) to plain AdaBoost; it exists for equivalence
    testing.  ``weight_trace``, when given a list, receives one
    (alpha, weight vector) pair per completed round.  The *_cal strategies
    fit a Platt sigmoid on the training scores after the loop.
    """
    sid = config.strategy_id
    loop_id = _LOOP_ID.get(sid, sid)
    X, y = dataset.features, dataset.labels
    n = dataset.n

    cost_vec = None
    if config.fixed_costs is not None:
        cost_vec = fixed_cost_vector(y, config.fixed_costs)

    if loop_id in COST_INITIALIZED:
        weights = normalized(cost_vec)
    else:
        weights = np.full(n, 1.0 / n)

    searcher = StumpSearcher(X)
    tracker = CumulativeTracker(y)
    members: list[EnsembleMember] = []
    records: list[RoundRecord] = []
    if record_diagnostics:
        records.append(RoundRecord(
            round=0, alpha=0.0, z=1.0,
            minority_weight_mass=float(np.sum(weights[y == 1])),
            cum_fnr=tracker.fnr, cum_fpr=tracker.fpr,
            balanced_error=0.5 * (tracker.fnr + tracker.fpr)))

    for t in range(1, config.rounds + 1):
        result = searcher.search(weights, y)
        preds = result.stump.predict(X)
        miss = preds != y

        if force_unit_costs and loop_id in (CUMULATIVE | PER_LEARNER_COST):
            round_costs = np.ones(n)
        elif loop_id in CUMULATIVE:
            # rates from the members accepted so far; the round's own member
            # only enters the rates used by the weight update below
            round_costs = tracker.costs(miss)
        elif loop_id in PER_LEARNER_COST:
            round_costs = per_learner_costs(preds, y)
        else:
            round_costs = cost_vec

        betas = None
        if loop_id == "adacost":
            betas = adacost_betas(cost_vec, miss)
        stats = collect_round_stats(weights, preds, y, costs=round_costs,
                                    betas=betas)

        if not continuation_check(loop_id, stats):
            if t == 1:
                raise TrainingDegenerate(
                    f"{sid}: continuation condition failed on round 1 "
                    f"(weighted error {stats.wrong_mass:.6f})")
            break

        alpha = compute_alpha(loop_id, stats)
        if loop_id == "rareboost":
            member = EnsembleMember(result.stump, alpha[0], alpha[1])
            stop_after = _rareboost_stop_after(stats)
        else:
            member = EnsembleMember(result.stump, alpha)
            stop_after = stats.wrong_mass == 0.0
        members.append(member)

        if loop_id in CUMULATIVE and not force_unit_costs:
            update_costs = update_cumulative_costs(tracker, alpha, preds, y)
        else:
            tracker.update(member.vote(preds))
            update_costs = round_costs

        factors = _update_factors(loop_id, update_costs, alpha, preds, y, betas)
        unnormalized = weights * factors
        z = float(unnormalized.sum())
        weights = unnormalized / z
        if weight_trace is not None:
            weight_trace.append((alpha, weights.copy()))

        if record_diagnostics:
            logged_alpha = (0.5 * (alpha[0] + alpha[1])
                            if loop_id == "rareboost" else alpha)
            records.append(RoundRecord(
                round=t, alpha=logged_alpha, z=z,
                minority_weight_mass=float(np.sum(weights[y == 1])),
                cum_fnr=tracker.fnr, cum_fpr=tracker.fpr,
                balanced_error=0.5 * (tracker.fnr + tracker.fpr)))
        if stop_after:
            break

    decision_shift = None
    if sid in SHIFTED:
        cost_pos, cost_neg = config.fixed_costs
        total = cost_pos + cost_neg
        decision_shift = (cost_pos / total, cost_neg / total)

    ensemble = Ensemble(members, sid, dataset.m, decision_shift=decision_shift,
                        diagnostics=records if record_diagnostics else None)
    if sid in CALIBRATED:
        ensemble.calibrator = platt_calibrate(ensemble, dataset)
    return ensemble


def fit_platt_sigmoid(scores, labels, max_iter: int = 200,
                      min_step: float = 1e-10,
                      ridge: float = 1e-12) -> tuple[float, float]:
    """Fit A, B of P(y=+1|s) = 1 / (1 + exp(A*s + B)) by penalized maximum
    likelihood with smoothed targets (N_pos+1)/(N_pos+2) and 1/(N_neg+2).

    Newton iterations with backtracking line search; raises CalibrationFailed
    if no convergence within ``max_iter``.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = labels.shape[0] - n_pos
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    target = np.where(labels == 1, hi, lo)

    def objective(a, b):
        fapb = a * scores + b
        # -sum(t*log(p) + (1-t)*log(1-p)) in the overflow-safe split form
        pos_part = fapb >= 0
        out = np.empty_like(fapb)
        out[pos_part] = (target[pos_part] * fapb[pos_part]
                         + np.log1p(np.exp(-fapb[pos_part])))
        out[~pos_part] = ((target[~pos_part] - 1.0) * fapb[~pos_part]
                          + np.log1p(np.exp(fapb[~pos_part])))
        return float(np.sum(out))

    a = 0.0
    b = math.log((n_neg + 1.0) / (n_pos + 1.0))
    fval = objective(a, b)
    for _ in range(max_iter):
        fapb = a * scores + b
        p = np.where(fapb >= 0,
                     np.exp(-np.maximum(fapb, 0)) / (1.0 + np.exp(-np.abs(fapb))),
                     1.0 / (1.0 + np.exp(np.minimum(fapb, 0))))
        d1 = target - p
        d2 = p * (1.0 - p)
        g1 = float(np.sum(scores * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            return a, b
        h11 = float(np.sum(scores * scores * d2)) + ridge
        h22 = float(np.sum(d2)) + ridge
        h21 = float(np.sum(scores * d2))
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(h11 * g2 - h21 * g1) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            new_a, new_b = a + step * da, b + step * db
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                a, b, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            raise CalibrationFailed("line search could not make progress")
    raise CalibrationFailed(f"no convergence within {max_iter} iterations")


def platt_calibrate(ensemble: Ensemble, dataset: Dataset) -> tuple[float, float]:
    """Fit the Platt sigmoid on the ensemble's raw scores over a dataset."""
    scores = ensemble.raw_score(dataset.features)
    return fit_platt_sigmoid(scores, dataset.labels)


def training_error_bound(ensemble: Ensemble,
                         dataset: Dataset) -> tuple[float, float]:
    """0/1 training error of the final ensemble and the product of the
    recorded per-round normalizers; the error never exceeds the product."""
    if not ensemble.diagnostics:
        raise MissingDiagnostics("ensemble carries no per-round Z history")
    preds = sign(ensemble.raw_score(dataset.features))
    error = float(np.mean(preds != dataset.labels))
    product = 1.0
    for rec in ensemble.diagnostics:
        if rec.round >= 1:
            product *= rec.z
    return error, product
