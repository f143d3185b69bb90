"""Command-line surface: train, eval, benchmark, grid-search, resample,
diagnostics. All commands are deterministic given --seed (falling back to the
BOOSTCRAFT_SEED environment variable, then 0)."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .core import (BoostcraftError, ConfigError, Dataset,
                   DimensionMismatch, Ensemble)
from .boosting import (FIXED_COST, PARAMETER_FREE, STRATEGY_IDS,
                       StrategyConfig, read_diagnostics_csv, train,
                       write_diagnostics_csv)
from .evaluation import (BENCHMARK_METHODS, CVPlan, DEFAULT_T_VALUES,
                         confidence_distribution, diagnostics_curves,
                         feature_importance, grid_search_costs, run_benchmark)
from .ingest import IngestSpec, ingest_csv, write_dataset_csv
from .metrics import confusion, suite
from .resample import RESAMPLE_METHODS, ResampleConfig, resample


def _add_data_args(parser: argparse.ArgumentParser, many: bool = False):
    if many:
        parser.add_argument("--data", required=True, nargs="+",
                            help="one or more dataset CSV paths")
    else:
        parser.add_argument("--data", required=True, help="dataset CSV path")
    parser.add_argument("--label", required=True,
                        help="label column name or index")
    parser.add_argument("--positive", required=True,
                        help="raw label value mapped to the positive class")
    parser.add_argument("--delimiter", default=",")
    parser.add_argument("--no-header", action="store_true",
                        help="CSV has no header row (columns named col0..)")


def _load(args, path=None) -> Dataset:
    spec = IngestSpec(path=path or args.data, label_column=args.label,
                      positive_label=args.positive, delimiter=args.delimiter,
                      has_header=not args.no_header)
    return ingest_csv(spec)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("BOOSTCRAFT_SEED")
    return int(env) if env else 0


def _costs_from_args(args, strategy, dataset, rounds, seed):
    if strategy in PARAMETER_FREE:
        if args.cost_neg is not None or args.grid_search:
            raise ConfigError(
                f"{strategy} is parameter-free and rejects fixed costs")
        return None
    if args.grid_search:
        return grid_search_costs(strategy, dataset, rounds, seed)
    if args.cost_neg is None:
        raise SystemExit(
            f"error: {strategy} requires --cost-neg or --grid-search")
    return (args.cost_pos, args.cost_neg)


def cmd_train(args) -> int:
    dataset = _load(args)
    seed = _seed(args)
    costs = _costs_from_args(args, args.strategy, dataset, args.t, seed)
    config = StrategyConfig(args.strategy, args.t, fixed_costs=costs, seed=seed)
    ensemble = train(config, dataset)
    ensemble.save(args.out)
    diag_path = args.diagnostics or str(Path(args.out).with_suffix("")) + \
        "_diagnostics.csv"
    write_diagnostics_csv(ensemble.diagnostics, diag_path)
    print(f"wrote {args.out} ({len(ensemble)} members) and {diag_path}")
    return 0


def cmd_eval(args) -> int:
    dataset = _load(args)
    ensemble = Ensemble.load(args.model)
    if ensemble.n_features != dataset.m:
        raise DimensionMismatch(
            f"model expects {ensemble.n_features} features, dataset has "
            f"{dataset.m}")
    preds = ensemble.predict(dataset.features)
    scores = ensemble.decision_score(dataset.features)
    report = suite(confusion(preds, dataset.labels), scores, dataset.labels)
    text = json.dumps(report.as_dict(), sort_keys=True, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def cmd_grid_search(args) -> int:
    dataset = _load(args)
    seed = _seed(args)
    cost_pos, cost_neg = grid_search_costs(
        args.strategy, dataset, args.t, seed,
        holdout_fraction=0.2 if args.holdout else None)
    print(json.dumps({"cost_pos": cost_pos, "cost_neg": cost_neg},
                     sort_keys=True))
    return 0


def cmd_benchmark(args) -> int:
    seed = _seed(args)
    datasets = {}
    for path in args.data:
        datasets[Path(path).stem] = _load(args, path=path)
    plan = CVPlan(repeats=args.repeats, folds=args.folds, seed=seed)
    report = run_benchmark(args.methods, datasets, plan, args.t_values,
                           grid_holdout=0.2 if args.grid_holdout else None,
                           jobs=args.jobs, k_neighbors=args.k)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write_long_csv(out_dir / "results.csv")
    report.write_summary_json(out_dir / "summary.json")
    if len(args.methods) >= 2 and len(datasets) >= 2:
        for rounds in args.t_values:
            report.write_rank_csv(out_dir / f"ranks_T{rounds}.csv", rounds)
    done = len(report.cells)
    failed = len(report.failures)
    print(f"benchmark complete: {done} cells, {failed} failures -> {out_dir}")
    return 0 if done > 0 else 1


def cmd_resample(args) -> int:
    dataset = _load(args)
    config = ResampleConfig(method=args.method, k_neighbors=args.k,
                            seed=_seed(args))
    balanced = resample(config, dataset)
    write_dataset_csv(balanced, args.out)
    print(f"wrote {args.out} ({balanced.minority_count}/"
          f"{balanced.majority_count} per class)")
    return 0


def cmd_diagnostics(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    wrote = []
    if args.model:
        if not args.data:
            raise SystemExit("error: --model requires --data")
        dataset = _load(args)
        ensemble = Ensemble.load(args.model)
        importance = feature_importance(ensemble)
        with open(out_dir / "feature_importance.csv", "w", newline="",
                  encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["feature", "importance"])
            for name, value in zip(dataset.feature_names, importance):
                writer.writerow([name, repr(float(value))])
        pos_conf, neg_conf = confidence_distribution(ensemble, dataset)
        with open(out_dir / "confidence.csv", "w", newline="",
                  encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["class", "confidence"])
            for value in pos_conf:
                writer.writerow([1, repr(float(value))])
            for value in neg_conf:
                writer.writerow([-1, repr(float(value))])
        wrote += ["feature_importance.csv", "confidence.csv"]
    if args.logs:
        curves = diagnostics_curves([read_diagnostics_csv(p) for p in args.logs])
        with open(out_dir / "curves.csv", "w", newline="",
                  encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["round", "minority_weight_mass", "alpha",
                             "balanced_error"])
            for i in range(curves["round"].shape[0]):
                writer.writerow([int(curves["round"][i]),
                                 repr(float(curves["minority_weight_mass"][i])),
                                 repr(float(curves["alpha"][i])),
                                 repr(float(curves["balanced_error"][i]))])
        wrote.append("curves.csv")
    if not wrote:
        raise SystemExit("error: supply --model/--data and/or --logs")
    print(f"wrote {', '.join(wrote)} -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boostcraft",
        description="Cost-sensitive boosting toolkit for imbalanced data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one strategy and save the model")
    _add_data_args(p)
    p.add_argument("--strategy", required=True, choices=STRATEGY_IDS)
    p.add_argument("--t", type=int, default=100, help="boosting rounds")
    p.add_argument("--cost-neg", type=float, default=None)
    p.add_argument("--cost-pos", type=float, default=1.0)
    p.add_argument("--grid-search", action="store_true",
                   help="pick costs by grid search on the training data")
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--diagnostics", default=None,
                   help="per-round diagnostics CSV (default <out>_diagnostics.csv)")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on a dataset")
    _add_data_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None, help="write the metric JSON here too")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid-search", help="grid-search the fixed cost pair")
    _add_data_args(p)
    p.add_argument("--strategy", required=True, choices=sorted(FIXED_COST))
    p.add_argument("--t", type=int, default=100)
    p.add_argument("--holdout", action="store_true",
                   help="score the grid on an internal 80/20 holdout")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("benchmark",
                       help="repeated stratified CV over methods and datasets")
    _add_data_args(p, many=True)
    p.add_argument("--methods", required=True, nargs="+",
                   choices=BENCHMARK_METHODS)
    p.add_argument("--t-values", type=int, nargs="+",
                   default=list(DEFAULT_T_VALUES))
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--k", type=int, default=5, help="smoteboost neighbors")
    p.add_argument("--grid-holdout", action="store_true")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("resample", help="write a class-balanced copy of a CSV")
    _add_data_args(p)
    p.add_argument("--method", required=True, choices=RESAMPLE_METHODS)
    p.add_argument("--k", type=int, default=5, help="smote neighbors")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_resample)

    p = sub.add_parser("diagnostics",
                       help="export feature importance, confidences, curves")
    p.add_argument("--model", default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--label", default=None)
    p.add_argument("--positive", default=None)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--logs", nargs="*", default=None,
                   help="training diagnostics CSVs to align and average")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_diagnostics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BoostcraftError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
