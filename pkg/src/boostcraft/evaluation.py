"""Experiment harness: stratified repeated cross-validation, fixed-cost grid
search, benchmark reports with fractional rank tables, Friedman significance
testing with Bonferroni-corrected post-hocs, and in-training diagnostics.

Benchmark cells (one per dataset, method, T, repeat, fold) are independent
and may run in parallel over the shared immutable datasets; aggregation always
walks cells in a fixed sorted order so reports are byte-stable.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import chi2, norm, rankdata

from .core import (BoostcraftError, ConfigError, Dataset, EmptyEnsemble,
                   Ensemble, MissingDiagnostics, sign)
from .boosting import (FIXED_COST, STRATEGY_IDS, StrategyConfig, train)
from .metrics import METRIC_NAMES, confusion, suite
from .resample import train_rusboost, train_smoteboost

BENCHMARK_METHODS = STRATEGY_IDS + ("rusboost", "smoteboost")
COST_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))
DEFAULT_T_VALUES = (25, 50, 100, 200)


@dataclass(frozen=True)
class CVPlan:
    """Repeated stratified k-fold plan (default: 10 x 5-fold)."""

    repeats: int = 10
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.repeats < 1 or self.folds < 2:
            raise ConfigError("need repeats >= 1 and folds >= 2")


def stratified_folds(plan: CVPlan, dataset: Dataset) -> np.ndarray:
    """Fold ids of shape (repeats, n), deterministic in the plan seed.

    Each class is shuffled and dealt round-robin with a fold pointer that
    carries across classes, so fold sizes differ by at most one overall and
    per class.
    """
    y = dataset.labels
    if min(dataset.minority_count, dataset.majority_count) < plan.folds:
        raise ConfigError(
            f"each class needs >= {plan.folds} instances for {plan.folds} folds")
    assignment = np.empty((plan.repeats, dataset.n), dtype=np.int64)
    for repeat in range(plan.repeats):
        rng = np.random.default_rng(np.random.SeedSequence([plan.seed, repeat]))
        pointer = 0
        for cls in (1, -1):
            idx = np.flatnonzero(y == cls)
            rng.shuffle(idx)
            for i in idx:
                assignment[repeat, i] = pointer % plan.folds
                pointer += 1
    return assignment


def _train_method(method: str, dataset: Dataset, rounds: int, seed: int,
                  costs=None, k_neighbors: int = 5) -> Ensemble:
    if method == "rusboost":
        return train_rusboost(dataset, rounds, seed, record_diagnostics=False)
    if method == "smoteboost":
        return train_smoteboost(dataset, rounds, k_neighbors, seed,
                                record_diagnostics=False)
    config = StrategyConfig(method, rounds, fixed_costs=costs, seed=seed)
    return train(config, dataset, record_diagnostics=False)


def grid_search_costs(strategy_id: str, dataset_train: Dataset, rounds: int,
                      seed: int = 0,
                      holdout_fraction: float | None = None
                      ) -> tuple[float, float]:
    """Pick (cost_pos=1.0, cost_neg) over the 0.1..1.0 grid by f1.

    Scored on the training split itself by default; ``holdout_fraction``
    switches to an internal stratified holdout (e.g. 0.2 for an 80/20 split).
    F1 ties break toward the larger, more cost-neutral cost_neg.
    """
    if strategy_id not in FIXED_COST:
        raise ConfigError(f"{strategy_id} does not take fixed costs")
    if holdout_fraction is None:
        fit_ds = score_ds = dataset_train
    else:
        folds = max(2, int(round(1.0 / holdout_fraction)))
        assign = stratified_folds(CVPlan(1, folds, seed), dataset_train)[0]
        fit_ds = dataset_train.subset(np.flatnonzero(assign != 0))
        score_ds = dataset_train.subset(np.flatnonzero(assign == 0))

    best_cost = None
    best_f1 = -1.0
    for cost_neg in COST_GRID:
        try:
            ensemble = _train_method(strategy_id, fit_ds, rounds, seed,
                                     costs=(1.0, cost_neg))
        except BoostcraftError:
            continue
        counts = confusion(ensemble.predict(score_ds.features), score_ds.labels)
        denom = 2 * counts.tp + counts.fp + counts.fn
        f1 = (2 * counts.tp / denom) if denom > 0 else 0.0
        if f1 >= best_f1:
            best_f1 = f1
            best_cost = cost_neg
    if best_cost is None:
        raise ConfigError(f"every grid candidate failed for {strategy_id}")
    return (1.0, best_cost)


@dataclass
class EvalReport:
    """Per-cell metric suites plus derived aggregates, ranks and significance.

    ``cells`` maps (dataset, method, T, repeat, fold) to a MetricSuite;
    ``failures`` maps failed cells to the error message (missing, not zero).
    """

    dataset_names: tuple
    methods: tuple
    t_values: tuple
    plan: CVPlan
    cells: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    rank_metric: str = "balanced_accuracy"

    def mean_metric(self, dataset: str, method: str, rounds: int,
                    metric: str) -> float:
        values = [getattr(ms, metric)
                  for key, ms in sorted(self.cells.items())
                  if key[0] == dataset and key[1] == method and key[2] == rounds]
        return float(np.mean(values)) if values else math.nan

    def aggregates(self) -> dict:
        """mean/std (population) per (dataset, method, T, metric)."""
        out: dict = {}
        for name in self.dataset_names:
            out[name] = {}
            for method in self.methods:
                out[name][method] = {}
                for rounds in self.t_values:
                    values = {metric: [] for metric in METRIC_NAMES}
                    for key, ms in sorted(self.cells.items()):
                        if key[:3] == (name, method, rounds):
                            for metric in METRIC_NAMES:
                                values[metric].append(getattr(ms, metric))
                    out[name][method][str(rounds)] = {
                        metric: {
                            "mean": float(np.mean(vals)) if vals else None,
                            "std": float(np.std(vals)) if vals else None,
                        }
                        for metric, vals in values.items()
                    }
        return out

    def rank_matrix(self, rounds: int, metric: str | None = None) -> np.ndarray:
        """Fractional ranks (datasets x methods), rank 1 = best mean metric."""
        metric = metric or self.rank_metric
        rows = []
        for name in self.dataset_names:
            means = [self.mean_metric(name, method, rounds, metric)
                     for method in self.methods]
            rows.append(rankdata([-v for v in means], method="average"))
        return np.asarray(rows)

    def friedman_results(self, rounds: int) -> dict:
        """Friedman test per control method (each adacc variant present, or
        the best-ranked method when neither is). Needs >= 2 methods and
        >= 2 datasets."""
        if len(self.methods) < 2 or len(self.dataset_names) < 2:
            return {}
        ranks = self.rank_matrix(rounds)
        controls = [m for m in ("adacc1", "adacc2") if m in self.methods]
        if not controls:
            controls = [self.methods[int(np.argmin(ranks.mean(axis=0)))]]
        out = {}
        for control in controls:
            result = friedman_test(ranks, control=self.methods.index(control))
            out[control] = {
                "statistic": result.statistic,
                "p_value": result.p_value,
                "pairwise_bonferroni_p": {
                    self.methods[j]: p for j, p in result.pairwise.items()},
            }
        return out

    def write_long_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["dataset", "method", "T", "repeat", "fold",
                             "metric", "value"])
            for key in sorted(self.cells):
                name, method, rounds, repeat, fold = key
                ms = self.cells[key]
                for metric in METRIC_NAMES:
                    writer.writerow([name, method, rounds, repeat, fold,
                                     metric, repr(getattr(ms, metric))])

    def write_rank_csv(self, path, rounds: int) -> None:
        ranks = self.rank_matrix(rounds)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["dataset"] + list(self.methods))
            for i, name in enumerate(self.dataset_names):
                writer.writerow([name] + [repr(v) for v in ranks[i].tolist()])
            writer.writerow(["avg"] + [repr(v)
                                       for v in ranks.mean(axis=0).tolist()])

    def summary(self) -> dict:
        doc = {
            "plan": {"repeats": self.plan.repeats, "folds": self.plan.folds,
                     "seed": self.plan.seed},
            "methods": list(self.methods),
            "t_values": list(self.t_values),
            "datasets": list(self.dataset_names),
            "aggregates": self.aggregates(),
            "failures": {";".join(map(str, key)): msg
                         for key, msg in sorted(self.failures.items())},
        }
        if len(self.methods) >= 2 and len(self.dataset_names) >= 2:
            doc["ranks"] = {
                str(rounds): {
                    "per_dataset": {
                        name: dict(zip(self.methods,
                                       self.rank_matrix(rounds)[i].tolist()))
                        for i, name in enumerate(self.dataset_names)},
                    "average": dict(zip(
                        self.methods,
                        self.rank_matrix(rounds).mean(axis=0).tolist())),
                }
                for rounds in self.t_values
            }
            doc["friedman"] = {str(rounds): self.friedman_results(rounds)
                               for rounds in self.t_values}
        return doc

    def write_summary_json(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.summary(), sort_keys=True, indent=1) + "\n",
            encoding="utf-8")


def _cell_seed(root: int, *indices: int) -> int:
    return int(np.random.SeedSequence([root, *indices]).generate_state(1)[0])


def _run_chunk(args):
    """One (dataset, method, T) chunk: all repeats and folds."""
    (name, ds_index, method, m_index, rounds, t_index, features, labels,
     assignment, plan_seed, grid, holdout, k_neighbors) = args
    dataset = Dataset(features, labels)
    results = {}
    failures = {}
    for repeat in range(assignment.shape[0]):
        for fold in range(int(assignment.max()) + 1):
            key = (name, method, rounds, repeat, fold)
            train_idx = np.flatnonzero(assignment[repeat] != fold)
            test_idx = np.flatnonzero(assignment[repeat] == fold)
            seed = _cell_seed(plan_seed, ds_index, m_index, t_index, repeat, fold)
            try:
                train_ds = dataset.subset(train_idx)
                test_ds = dataset.subset(test_idx)
                costs = None
                if method in FIXED_COST and grid:
                    costs = grid_search_costs(method, train_ds, rounds, seed,
                                              holdout_fraction=holdout)
                ensemble = _train_method(method, train_ds, rounds, seed,
                                         costs=costs, k_neighbors=k_neighbors)
                preds = ensemble.predict(test_ds.features)
                scores = ensemble.decision_score(test_ds.features)
                results[key] = suite(confusion(preds, test_ds.labels), scores,
                                     test_ds.labels)
            except BoostcraftError as exc:
                failures[key] = f"{type(exc).__name__}: {exc}"
    return results, failures


def run_benchmark(methods, datasets, plan: CVPlan,
                  t_values=DEFAULT_T_VALUES, *, grid_search: bool = True,
                  grid_holdout: float | None = None, jobs: int = 1,
                  k_neighbors: int = 5) -> EvalReport:
    """Evaluate every (method, T, repeat, fold) cell of every dataset.

    ``datasets`` maps name -> Dataset. Fixed-cost methods grid-search their
    cost pair on each fold's training split. Per-cell failures are recorded
    in the report rather than aborting the run.
    """
    methods = tuple(methods)
    for method in methods:
        if method not in BENCHMARK_METHODS:
            raise ConfigError(f"unknown benchmark method {method!r}")
    names = tuple(datasets)
    t_values = tuple(int(t) for t in t_values)
    report = EvalReport(names, methods, t_values, plan)

    chunks = []
    for ds_index, name in enumerate(names):
        dataset = datasets[name]
        assignment = stratified_folds(plan, dataset)
        for m_index, method in enumerate(methods):
            for t_index, rounds in enumerate(t_values):
                chunks.append((name, ds_index, method, m_index, rounds,
                               t_index, dataset.features, dataset.labels,
                               assignment, plan.seed, grid_search,
                               grid_holdout, k_neighbors))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_chunk, chunks))
    else:
        outputs = [_run_chunk(chunk) for chunk in chunks]
    for results, failures in outputs:
        report.cells.update(results)
        report.failures.update(failures)
    return report


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    p_value: float
    pairwise: dict  # column index -> Bonferroni-adjusted p versus the control


def friedman_test(rank_matrix, control: int = 0) -> FriedmanResult:
    """Friedman chi-square over a (datasets x methods) fractional-rank matrix
    with post-hoc comparisons of every method against the control column.

    statistic = 12N/(k(k+1)) * sum_j (mean_rank_j - (k+1)/2)^2 with k-1
    degrees of freedom; post-hoc z-tests use the standard error
    sqrt(k(k+1)/(6N)) and Bonferroni correction over the k-1 comparisons.
    """
    ranks = np.asarray(rank_matrix, dtype=np.float64)
    if ranks.ndim != 2 or ranks.shape[1] < 2:
        raise ConfigError("need a 2-D rank matrix with >= 2 methods")
    n_datasets, k = ranks.shape
    if n_datasets < 2:
        raise ConfigError("need >= 2 datasets for the Friedman test")
    if not (0 <= control < k):
        raise ConfigError("control column out of range")
    mean_ranks = ranks.mean(axis=0)
    center = (k + 1) / 2.0
    statistic = 12.0 * n_datasets / (k * (k + 1)) * float(
        np.sum((mean_ranks - center) ** 2))
    p_value = float(chi2.sf(statistic, k - 1))
    se = math.sqrt(k * (k + 1) / (6.0 * n_datasets))
    pairwise = {}
    for j in range(k):
        if j == control:
            continue
        z = abs(mean_ranks[control] - mean_ranks[j]) / se
        pairwise[j] = min(1.0, 2.0 * float(norm.sf(z)) * (k - 1))
    return FriedmanResult(statistic, p_value, pairwise)


def diagnostics_curves(training_logs) -> dict:
    """Align per-round series from one or more diagnostics logs.

    Returns arrays for round, minority weight mass, alpha, and the partial
    ensemble's balanced error, averaged per round across the logs that
    reached it (runs may stop early).
    """
    logs = [list(log) for log in training_logs if log]
    if not logs:
        raise MissingDiagnostics("no diagnostics logs supplied")
    max_round = max(rec.round for log in logs for rec in log)
    rounds = np.arange(max_round + 1)
    mass = np.full(max_round + 1, np.nan)
    alpha = np.full(max_round + 1, np.nan)
    balanced_error = np.full(max_round + 1, np.nan)
    for r in rounds:
        mass_vals, alpha_vals, err_vals = [], [], []
        for log in logs:
            for rec in log:
                if rec.round == r:
                    mass_vals.append(rec.minority_weight_mass)
                    alpha_vals.append(rec.alpha)
                    err_vals.append(rec.balanced_error)
        if mass_vals:
            mass[r] = np.mean(mass_vals)
            alpha[r] = np.mean(alpha_vals)
            balanced_error[r] = np.mean(err_vals)
    return {"round": rounds, "minority_weight_mass": mass, "alpha": alpha,
            "balanced_error": balanced_error}


def feature_importance(ensemble: Ensemble) -> np.ndarray:
    """Distribution over features: each member adds its vote weight to its
    split feature (RareBoost members contribute the mean of their two)."""
    if not ensemble.members:
        raise EmptyEnsemble("ensemble has no members")
    importance = np.zeros(ensemble.n_features)
    for member in ensemble.members:
        weight = member.alpha
        if member.alpha_neg is not None:
            weight = 0.5 * (member.alpha + member.alpha_neg)
        importance[member.stump.feature_index] += weight
    return importance / importance.sum()


def confidence_distribution(ensemble: Ensemble,
                            dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Signed margins y * raw_score / vote bound in [-1, 1], split by class;
    misclassified instances land below 0."""
    margins = ensemble.raw_score(dataset.features)
    conf = dataset.labels * margins / ensemble.vote_bound()
    return conf[dataset.labels == 1], conf[dataset.labels == -1]


def replay_balanced_errors(ensemble: Ensemble, dataset: Dataset) -> list[float]:
    """Balanced error of every ensemble prefix (round 0 = empty ensemble),
    re-predicting stumps from scratch; the oracle for logged series."""
    y = dataset.labels
    n_pos = int(np.sum(y == 1))
    n_neg = y.shape[0] - n_pos
    margin = np.zeros(dataset.n)
    series = []
    for upto in range(len(ensemble.members) + 1):
        if upto > 0:
            member = ensemble.members[upto - 1]
            margin = margin + member.vote(member.stump.predict(dataset.features))
        predicted = sign(margin)
        fnr = float(np.sum((predicted != 1) & (y == 1))) / n_pos
        fpr = float(np.sum((predicted == 1) & (y == -1))) / n_neg
        series.append(0.5 * (fnr + fpr))
    return series
