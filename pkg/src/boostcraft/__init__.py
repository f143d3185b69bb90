"""boostcraft: cost-sensitive boosting for imbalanced binary classification.

Implements the cumulative-cost strategies AdaCC1/AdaCC2 (parameter-free,
per-round dynamic misclassification costs) next to the classic fixed-cost
boosting baselines (CGAda, AdaMEC, RareBoost, CSB1/2, AdaCost, AdaC1-3, and
calibrated variants), data-level balancing (ROS/RUS/SMOTE), hybrid boosting
(RUSBoost/SMOTEBoost), an imbalance-aware metrics suite, and a repeated
cross-validation benchmark harness with Friedman significance testing.
"""
from .core import (BoostcraftError, CalibrationFailed, ConfigError, Dataset,
                   DimensionMismatch, EmptyEnsemble, Ensemble, EnsembleMember,
                   IngestError, InvalidWeights, MissingDiagnostics, Stump,
                   TrainingDegenerate, UndefinedMetric, normalized,
                   predict_label, raw_score, sign)
from .stump import StumpSearchResult, StumpSearcher, predict_stump, train_stump
from .boosting import (CumulativeTracker, RoundRecord, StrategyConfig,
                       STRATEGY_IDS, compute_alpha, continuation_check,
                       fit_platt_sigmoid, per_learner_costs, platt_calibrate,
                       read_diagnostics_csv, reweight, train,
                       training_error_bound, update_cumulative_costs,
                       write_diagnostics_csv)
from .metrics import (ConfusionCounts, METRIC_NAMES, MetricSuite, auc_score,
                      confusion, suite)
from .resample import (ResampleConfig, resample, train_rusboost,
                       train_smoteboost)
from .evaluation import (CVPlan, EvalReport, FriedmanResult,
                         confidence_distribution, diagnostics_curves,
                         feature_importance, friedman_test, grid_search_costs,
                         run_benchmark, stratified_folds)
from .ingest import IngestSpec, ingest_csv, write_dataset_csv
from .estimator import BoostingClassifier

__version__ = "0.1.0"

__all__ = [
    "BoostcraftError", "CalibrationFailed", "ConfigError", "Dataset",
    "DimensionMismatch", "EmptyEnsemble", "Ensemble", "EnsembleMember",
    "IngestError", "InvalidWeights", "MissingDiagnostics", "Stump",
    "TrainingDegenerate", "UndefinedMetric", "normalized", "predict_label",
    "raw_score", "sign",
    "StumpSearchResult", "StumpSearcher", "predict_stump", "train_stump",
    "CumulativeTracker", "RoundRecord", "StrategyConfig", "STRATEGY_IDS",
    "compute_alpha", "continuation_check", "fit_platt_sigmoid",
    "per_learner_costs", "platt_calibrate", "read_diagnostics_csv", "reweight",
    "train", "training_error_bound", "update_cumulative_costs",
    "write_diagnostics_csv",
    "ConfusionCounts", "METRIC_NAMES", "MetricSuite", "auc_score", "confusion",
    "suite",
    "ResampleConfig", "resample", "train_rusboost", "train_smoteboost",
    "CVPlan", "EvalReport", "FriedmanResult", "confidence_distribution",
    "diagnostics_curves", "feature_importance", "friedman_test",
    "grid_search_costs", "run_benchmark", "stratified_folds",
    "IngestSpec", "ingest_csv", "write_dataset_csv",
    "BoostingClassifier",
]
