"""
Command line interface.

Commands: ``train``, ``evaluate``, ``chain-curve``, ``grid`` and ``rank``. All tables are written as CSV.
Errors are printed to stderr as ``dynchain-error: <type>: <message>`` and exit with status 1,
usage errors keep the status 2 of argparse.
"""
import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from typing import List, Optional

import pandas as pd

from .booster import BoostConfig
from .chain import predict_chain, round_label_counts, round_metrics, train_chain
from .dataset import FORMATS, Dataset, load_dataset
from .errors import WidthMismatchError
from .evaluation import (
    CHAIN_METHODS,
    METHODS,
    GridSpec,
    evaluate_model,
    fit_model,
    grid_search,
    rank_table,
)
from .gains import GAIN_ALIASES, GainStrategy
from .log import enable_logging, logger
from .model_io import load_model, save_model

ERROR_PREFIX = "dynchain-error"


@dataclass
class RunConfig:
    """Validated settings of one command line invocation"""

    command: str
    method: Optional[str] = None
    train: Optional[str] = None
    test: Optional[str] = None
    format: str = "mlc-csv"
    labels: Optional[int] = None
    features: Optional[int] = None
    boost: BoostConfig = BoostConfig()
    chain_length: Optional[int] = None
    cumulate: bool = False
    seed: int = 0
    model_out: Optional[str] = None
    model_in: Optional[str] = None
    out: Optional[str] = None
    grid: Optional[str] = None
    omit_timing: bool = False

    def __post_init__(self):
        if self.method is not None and self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, but you gave {self.method}")
        if self.method not in CHAIN_METHODS:
            if self.chain_length is not None:
                raise ValueError("--chain-length is only valid for the xdcc methods")
            if self.cumulate:
                raise ValueError("--cumulate is only valid for the xdcc methods")
        if self.method == "xdcc" and self.cumulate:
            self.method = "xdcc-cum"
        if self.chain_length is not None and self.chain_length < 1:
            raise ValueError(f"chain length must be >= 1, but you gave {self.chain_length}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        boost = BoostConfig(
            n_rounds=args.trees,
            max_depth=args.depth,
            learning_rate=args.eta,
            lambda_reg=args.lambda_reg,
            gamma=args.gamma,
            min_child_weight=args.min_child_weight,
            gain_strategy=GainStrategy.from_name(args.gain),
        )
        return cls(
            command=args.command,
            method=getattr(args, "method", "xdcc" if args.command == "chain-curve" else None),
            train=getattr(args, "train", None),
            test=getattr(args, "test", None),
            format=args.format,
            labels=args.labels,
            features=args.features,
            boost=boost,
            chain_length=getattr(args, "chain_length", None),
            cumulate=getattr(args, "cumulate", False),
            seed=args.seed,
            model_out=getattr(args, "model_out", None),
            model_in=getattr(args, "model_in", None),
            out=getattr(args, "out", None),
            grid=getattr(args, "grid", None),
            omit_timing=getattr(args, "omit_timing", False),
        )

    def load(self, path: str, n_features: Optional[int] = None) -> Dataset:
        """Load a dataset, ``n_features`` is the width a trained model expects of svmlight-ml files"""
        if self.features is not None:
            n_features = self.features
        return load_dataset(path, self.format, self.labels, n_features)


def _write_table(table: pd.DataFrame, path: Optional[str]):
    """Write a CSV table to ``path``, or to stdout if no path is given"""
    if path is None:
        sys.stdout.write(table.to_csv(index=False))
    else:
        table.to_csv(path, index=False)
        logger.info(f"Wrote {len(table)} rows to {path}")


def cmd_train(run: RunConfig):
    """Train a model, save it and log per-round times plus training-set round metrics for chains"""
    train = run.load(run.train)
    if run.method in CHAIN_METHODS:
        start = time.perf_counter()
        model, trace = train_chain(
            train, run.boost, run.chain_length, run.seed, run.method == "xdcc-cum"
        )
        model.train_seconds = time.perf_counter() - start
        metrics = round_metrics(trace, train.labels, cumulate=model.cumulate)
        for r, seconds in enumerate(trace.train_seconds):
            row = metrics.iloc[r]
            logger.info(
                f"round {r + 1}: {seconds:.3f}s, train HA {row['HA']:.4f}, SA {row['SA']:.4f}, "
                f"F1 {row['F1']:.4f}, pos_frac {row['pos_frac']:.4f}, neg_frac {row['neg_frac']:.4f}"
            )
        if run.out is not None:
            if not run.omit_timing:
                metrics["train_time"] = pd.Series(trace.train_seconds).cumsum()
            _write_table(metrics, run.out)
    else:
        model = fit_model(run.method, train, run.boost, None, run.seed)
    save_model(model, run.model_out)


def cmd_evaluate(run: RunConfig):
    """Evaluate a saved model on a test set, print and write HA, SA, F1 and timings"""
    model = load_model(run.model_in)
    test = run.load(run.test, model.n_features)
    if test.n_labels != model.n_labels:
        raise WidthMismatchError(
            f"model predicts {model.n_labels} labels, but the test set has {test.n_labels}"
        )
    report = evaluate_model(model, test)
    table = pd.DataFrame([{"method": model.method, **report.to_dict(not run.omit_timing)}])
    _write_table(table, run.out)
    if run.out is not None:
        for key, value in report.to_dict(not run.omit_timing).items():
            print(f"{key}: {value:.6f}")


def cmd_chain_curve(run: RunConfig):
    """
    Train one chain up to the maximum length and evaluate every prefix on the test set,
    for plain and cumulated predictions.
    """
    train = run.load(run.train)
    test = run.load(run.test, train.n_features)
    model, train_trace = train_chain(train, run.boost, run.chain_length, run.seed)
    _, trace = predict_chain(model, test)
    cumulative_time = pd.Series(train_trace.train_seconds).cumsum()

    tables = []
    for method, cumulate in (("xdcc", False), ("xdcc-cum", True)):
        table = round_metrics(trace, test.labels, cumulate=cumulate)
        table.insert(1, "method", method)
        if not run.omit_timing:
            table["train_time"] = cumulative_time.to_numpy()
        tables.append(table)
    curve = pd.concat(tables, ignore_index=True)
    _write_table(curve, run.out)

    if run.out is not None:
        counts = round_label_counts(trace, test.label_names)
        counts_path = f"{os.path.splitext(run.out)[0]}.labels.csv"
        counts.to_csv(counts_path)
        logger.info(f"Wrote propagated label counts per round to {counts_path}")


def cmd_grid(run: RunConfig):
    """Grid search on a holdout split of the training set, writes the table and the best configuration"""
    train = run.load(run.train)
    spec = GridSpec.from_file(run.grid)
    best, table = grid_search(train, spec, run.method, run.seed, timing=not run.omit_timing)
    _write_table(table, run.out)

    best_config = {**best.config.to_dict(), "chain_length": best.chain_length, "method": run.method}
    if run.out is not None:
        best_path = f"{os.path.splitext(run.out)[0]}.best.json"
        with open(best_path, "w", encoding="utf-8") as handle:
            json.dump(best_config, handle, indent=2)
        logger.info(f"Wrote best configuration to {best_path}")
    print(json.dumps(best_config), file=sys.stderr)


def cmd_rank(args: argparse.Namespace):
    """Average ranks of methods over datasets, from CSV tables with dataset, method and value columns"""
    long = pd.concat([pd.read_csv(path) for path in args.tables], ignore_index=True)
    ranks = rank_table(long, higher_is_better=not args.lower_is_better)
    if args.out is None:
        sys.stdout.write(ranks.to_csv())
    else:
        ranks.to_csv(args.out)


def _add_data_arguments(parser: argparse.ArgumentParser, train: bool, test: bool):
    if train:
        parser.add_argument("--train", required=True, help="training set file")
    if test:
        parser.add_argument("--test", required=True, help="test set file")
    parser.add_argument("--format", choices=FORMATS, default="mlc-csv")
    parser.add_argument(
        "--labels", type=int, default=None, help="number of labels of svmlight-ml files"
    )
    parser.add_argument(
        "--features", type=int, default=None, help="number of features of svmlight-ml files"
    )


def _add_boost_arguments(parser: argparse.ArgumentParser):
    defaults = BoostConfig()
    gains = [g.value for g in GainStrategy] + list(GAIN_ALIASES)
    parser.add_argument("--trees", type=int, default=defaults.n_rounds, help="boosting rounds")
    parser.add_argument("--depth", type=int, default=defaults.max_depth, help="max tree depth")
    parser.add_argument("--eta", type=float, default=defaults.learning_rate, help="learning rate")
    parser.add_argument("--lambda", dest="lambda_reg", type=float, default=defaults.lambda_reg)
    parser.add_argument("--gamma", type=float, default=defaults.gamma)
    parser.add_argument("--min-child-weight", type=float, default=defaults.min_child_weight)
    parser.add_argument("--gain", choices=gains, default=defaults.gain_strategy.value)


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with the same prefix as all other errors"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(2, f"{ERROR_PREFIX}: ArgumentError: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(
        prog="dynchain",
        description="Multi-label gradient boosted trees and dynamic classifier chains",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="train and save a model")
    train.add_argument("--method", choices=METHODS, required=True)
    _add_data_arguments(train, train=True, test=False)
    _add_boost_arguments(train)
    train.add_argument("--chain-length", type=int, default=None)
    train.add_argument("--cumulate", action="store_true")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--model-out", required=True)
    train.add_argument("--out", default=None, help="CSV of training-set round metrics (chains only)")
    train.add_argument("--omit-timing", action="store_true")

    evaluate = commands.add_parser("evaluate", help="evaluate a saved model")
    evaluate.add_argument("--model-in", required=True)
    _add_data_arguments(evaluate, train=False, test=True)
    _add_boost_arguments(evaluate)
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--out", default=None)
    evaluate.add_argument("--omit-timing", action="store_true")

    curve = commands.add_parser("chain-curve", help="metrics for every prefix of a chain")
    _add_data_arguments(curve, train=True, test=True)
    _add_boost_arguments(curve)
    curve.add_argument("--chain-length", type=int, default=None, help="maximum chain length")
    curve.add_argument("--seed", type=int, default=0)
    curve.add_argument("--out", default=None)
    curve.add_argument("--omit-timing", action="store_true")

    grid = commands.add_parser("grid", help="grid search on a holdout split")
    grid.add_argument("--method", choices=METHODS, required=True)
    _add_data_arguments(grid, train=True, test=False)
    _add_boost_arguments(grid)
    grid.add_argument("--grid", required=True, help="file with one `key=v1,v2,...` line per parameter")
    grid.add_argument("--seed", type=int, default=0)
    grid.add_argument("--out", default=None)
    grid.add_argument("--omit-timing", action="store_true")

    rank = commands.add_parser("rank", help="average ranks over datasets")
    rank.add_argument("tables", nargs="+", help="CSV files with dataset, method and value columns")
    rank.add_argument("--lower-is-better", action="store_true")
    rank.add_argument("--out", default=None)
    return parser


COMMANDS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "chain-curve": cmd_chain_curve,
    "grid": cmd_grid,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        log_file = None
        if getattr(args, "model_out", None) is not None:
            log_file = f"{args.model_out}.log"
        enable_logging(logging.INFO, log_file)

        if args.command == "rank":
            cmd_rank(args)
        else:
            COMMANDS[args.command](RunConfig.from_args(args))
    except Exception as e:
        print(f"{ERROR_PREFIX}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
