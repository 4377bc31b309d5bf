"""Training any method through one entry point, timing, grid search and rank aggregation."""
import itertools
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .abstract_model import AbstractMultiLabelModel
from .baselines import train_br, train_cc, train_mlxgb
from .booster import BoostConfig
from .chain import train_chain
from .dataset import Dataset, split_holdout
from .gains import GainStrategy
from .log import logger
from .metrics import example_f1, hamming_accuracy, subset_accuracy

METHODS = ("br", "cc", "mlxgb", "xdcc", "xdcc-cum")
"""Methods that can be trained with :func:`fit_model`"""

CHAIN_METHODS = ("xdcc", "xdcc-cum")

GAIN_METHODS = ("mlxgb", "xdcc", "xdcc-cum")
"""Methods that use the gain strategy, the single-label baselines always use sumGain"""


@dataclass
class MetricsReport:
    HA: float
    SA: float
    F1: float
    train_time: float = 0.0
    predict_time: float = 0.0

    def to_dict(self, timing: bool = True) -> Dict[str, float]:
        values = asdict(self)
        if not timing:
            del values["train_time"], values["predict_time"]
        return values


def fit_model(
    method: str,
    train: Dataset,
    config: Optional[BoostConfig] = None,
    chain_length: Optional[int] = None,
    seed: int = 0,
) -> AbstractMultiLabelModel:
    """
    Train one of :data:`METHODS`. The wall-clock training time is stored in ``model.train_seconds``.

    :param method: ``br``, ``cc``, ``mlxgb``, ``xdcc`` or ``xdcc-cum``
    :param train: training set
    :param config: booster hyperparameters
    :param chain_length: rounds of the dynamic chain, only valid for the chain methods
    :param seed: seed for the classifier chain order
    :return: the trained model
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, but you gave {method}")
    if chain_length is not None and method not in CHAIN_METHODS:
        raise ValueError(f"chain length is only valid for {CHAIN_METHODS}, not for {method}")
    config = config if config is not None else BoostConfig()
    if method not in GAIN_METHODS:
        config = replace(config, gain_strategy=GainStrategy.SUM_GAIN)

    start = time.perf_counter()
    if method == "br":
        model = train_br(train, config)
    elif method == "cc":
        model = train_cc(train, config, seed)
    elif method == "mlxgb":
        model = train_mlxgb(train, config)
    else:
        model, _ = train_chain(train, config, chain_length, seed, method == "xdcc-cum")
    model.train_seconds = time.perf_counter() - start
    logger.info(f"Trained {method} in {model.train_seconds:.3f}s")
    return model


def evaluate_model(model: AbstractMultiLabelModel, test: Dataset) -> MetricsReport:
    """Predict the test set and report HA, SA and F1 plus training and prediction time"""
    start = time.perf_counter()
    predictions = model.predict(test)
    predict_time = time.perf_counter() - start
    return MetricsReport(
        HA=hamming_accuracy(test.labels, predictions),
        SA=subset_accuracy(test.labels, predictions),
        F1=example_f1(test.labels, predictions),
        train_time=model.train_seconds,
        predict_time=predict_time,
    )


def train_time_ratios(reports: Mapping[str, MetricsReport], reference: str) -> pd.Series:
    """Training time of each method divided by the training time of the reference method"""
    reference_time = reports[reference].train_time
    if reference_time <= 0:
        raise ValueError(f"reference method {reference} has no positive training time")
    return pd.Series(
        {method: report.train_time / reference_time for method, report in reports.items()},
        name=f"train_time / {reference}",
    )


GRID_KEYS = {
    "trees": "n_rounds",
    "depth": "max_depth",
    "eta": "learning_rate",
    "lambda": "lambda_reg",
    "gamma": "gamma",
    "min-child-weight": "min_child_weight",
    "gain": "gain_strategy",
    "chain-length": "chain_length",
}
"""Keys of grid files, named like the command line flags, mapped to :class:`GridSpec` fields"""


class GridCell(NamedTuple):
    config: BoostConfig
    chain_length: Optional[int]


@dataclass
class GridSpec:
    """Candidate values of each hyperparameter, the grid is their Cartesian product"""

    n_rounds: List[int] = field(default_factory=lambda: [BoostConfig.n_rounds])
    max_depth: List[int] = field(default_factory=lambda: [BoostConfig.max_depth])
    learning_rate: List[float] = field(default_factory=lambda: [BoostConfig.learning_rate])
    lambda_reg: List[float] = field(default_factory=lambda: [BoostConfig.lambda_reg])
    gamma: List[float] = field(default_factory=lambda: [BoostConfig.gamma])
    min_child_weight: List[float] = field(
        default_factory=lambda: [BoostConfig.min_child_weight]
    )
    gain_strategy: List[GainStrategy] = field(
        default_factory=lambda: [GainStrategy.SUM_GAIN]
    )
    chain_length: List[Optional[int]] = field(default_factory=lambda: [None])
    """None trains chains with one round per label"""

    def __post_init__(self):
        for name, values in asdict(self).items():
            if len(values) == 0:
                raise ValueError(f"grid needs at least one candidate for {name}")
        self.gain_strategy = [GainStrategy.from_name(g) for g in self.gain_strategy]

    @classmethod
    def reference_grid(cls) -> "GridSpec":
        """Depth, tree count, learning rate and every gain strategy, as tuned for the benchmarks"""
        return cls(
            n_rounds=[10, 20, 50, 100],
            max_depth=[5, 10, 20, 50, 100],
            learning_rate=[0.1, 0.2, 0.3],
            gain_strategy=list(GainStrategy),
        )

    @classmethod
    def from_file(cls, path: str) -> "GridSpec":
        """
        Read a grid file with one ``key=v1,v2,...`` line per hyperparameter.
        Keys are ``trees``, ``depth``, ``eta``, ``lambda``, ``gamma``, ``min-child-weight``, ``gain``
        and ``chain-length``. Blank lines and lines starting with ``#`` are ignored.
        """
        casts = {
            "n_rounds": int,
            "max_depth": int,
            "learning_rate": float,
            "lambda_reg": float,
            "gamma": float,
            "min_child_weight": float,
            "gain_strategy": GainStrategy.from_name,
            "chain_length": int,
        }
        values = {}
        with open(path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, separator, candidates = line.partition("=")
                key = key.strip()
                if not separator or key not in GRID_KEYS:
                    raise ValueError(
                        f"line {line_number} of {path}: expected `key=v1,v2,...` "
                        f"with key in {list(GRID_KEYS)}, found `{line}`"
                    )
                name = GRID_KEYS[key]
                try:
                    values[name] = [casts[name](c.strip()) for c in candidates.split(",")]
                except ValueError as e:
                    raise ValueError(f"line {line_number} of {path}: {e}")
        return cls(**values)

    def cells(self, method: str) -> Iterator[GridCell]:
        """
        Enumerate the grid for a method. Gain strategies are only varied for the multi-label methods,
        chain lengths only for the chain methods.
        """
        gains = self.gain_strategy if method in GAIN_METHODS else [GainStrategy.SUM_GAIN]
        lengths = self.chain_length if method in CHAIN_METHODS else [None]
        for combination in itertools.product(
            self.n_rounds,
            self.max_depth,
            self.learning_rate,
            self.lambda_reg,
            self.gamma,
            self.min_child_weight,
            gains,
            lengths,
        ):
            yield GridCell(BoostConfig(*combination[:-1]), combination[-1])


def _cell_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def grid_search(
    train: Dataset,
    spec: GridSpec,
    method: str,
    seed: int = 0,
    fraction: float = 0.2,
    timing: bool = True,
) -> Tuple[GridCell, pd.DataFrame]:
    """
    Exhaustive grid search on a random holdout split of the training set, scored by example-based F1.

    :param train: the training set, ``fraction`` of it is held out for validation
    :param spec: the candidate values
    :param method: one of :data:`METHODS`
    :param seed: seed of the holdout split, per-cell seeds are derived from it and the cell index
    :param fraction: share of the validation set
    :param timing: whether the table includes the training time of each cell
    :return: the best cell (the first one in enumeration order on ties) and the table of all cells
    """
    fit_part, validation = split_holdout(train, fraction, seed)
    rows = []
    cells = []
    for index, cell in enumerate(spec.cells(method)):
        model = fit_model(method, fit_part, cell.config, cell.chain_length, _cell_seed(seed, index))
        report = evaluate_model(model, validation)
        row = {
            "cell": index,
            "trees": cell.config.n_rounds,
            "depth": cell.config.max_depth,
            "eta": cell.config.learning_rate,
            "lambda": cell.config.lambda_reg,
            "gamma": cell.config.gamma,
            "min_child_weight": cell.config.min_child_weight,
            "gain": cell.config.gain_strategy.value,
            "chain_length": cell.chain_length,
            "F1": report.F1,
            "HA": report.HA,
            "SA": report.SA,
        }
        if timing:
            row["train_time"] = report.train_time
        rows.append(row)
        cells.append(cell)
        logger.info(f"Grid cell {index}: F1 {report.F1:.4f} for {cell}")

    table = pd.DataFrame(rows)
    best = int(np.argmax(table["F1"].to_numpy()))
    return cells[best], table


def rank_table(
    tables: Union[Mapping[str, Mapping[str, float]], pd.DataFrame], higher_is_better: bool = True
) -> pd.DataFrame:
    """
    Rank methods per dataset (1 is best, ties share their mean rank) and average the ranks over datasets.

    :param tables: either ``{dataset: {method: value}}`` or a long table with the columns
           ``dataset``, ``method`` and ``value``
    :param higher_is_better: rank the largest value first
    :return: one row per method with a column of ranks per dataset, the ``average_rank`` and
             the rank of the average rank in ``rank_of_average``
    """
    if isinstance(tables, pd.DataFrame):
        wide = tables.pivot(index="method", columns="dataset", values="value")
    else:
        wide = pd.DataFrame(dict(tables))
    if wide.isna().any().any():
        missing = [
            f"{method}@{dataset}"
            for dataset in wide.columns
            for method in wide.index[wide[dataset].isna()]
        ]
        raise ValueError(f"every method needs a value for every dataset, missing {missing}")

    sign = -1.0 if higher_is_better else 1.0
    ranks = wide.apply(lambda column: pd.Series(rankdata(sign * column.to_numpy()), index=column.index))
    ranks["average_rank"] = ranks.mean(axis="columns")
    ranks["rank_of_average"] = rankdata(ranks["average_rank"].to_numpy())
    ranks.index.name = "method"
    return ranks.sort_values("average_rank", kind="stable")
