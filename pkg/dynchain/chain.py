"""
Dynamic classifier chains of multi-label boosters.

Each round trains a multi-label booster on the original features plus one label-feature per label.
After every round, each instance propagates exactly one of its not yet propagated labels into its
label-features: the most probable one if it is at least 0.5, the least probable one otherwise.
Propagated labels are never changed again and do not contribute to the training of later rounds.
"""
import functools
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .abstract_model import AbstractMultiLabelModel, binarize
from .booster import BoostConfig, MLBooster, train_booster
from .dataset import Dataset, augment
from .errors import ModelFormatError
from .log import logger
from .metrics import example_f1, hamming_accuracy, subset_accuracy
from .types import (
    MISSING,
    FeatureMatrix,
    LabelMatrix,
    ModelDump,
    ProbabilityMatrix,
    PropagationMatrix,
)


ChainCallback = Callable[[int, int, np.ndarray, np.ndarray], None]
"""Called with ``(round_index, tree_index, grad, hess)``, see :data:`dynchain.booster.TrainingCallback`"""


@dataclass
class RoundTrace:
    """Per-round predictions and propagation states of a chain run"""

    probabilities: List[ProbabilityMatrix] = field(default_factory=list)
    """predicted probabilities of each round, ``M x N``"""

    states: List[PropagationMatrix] = field(default_factory=list)
    """propagation state after each round, ``M x N``"""

    propagated: List[np.ndarray] = field(default_factory=list)
    """label index propagated by each instance in each round, -1 if none was left"""

    train_seconds: List[float] = field(default_factory=list)
    """wall-clock training time of each round, empty for prediction traces"""

    @property
    def n_rounds(self) -> int:
        return len(self.states)

    def record(
        self,
        probabilities: ProbabilityMatrix,
        state: PropagationMatrix,
        propagated: np.ndarray,
        seconds: Optional[float] = None,
    ):
        self.probabilities.append(probabilities)
        self.states.append(state)
        self.propagated.append(propagated)
        if seconds is not None:
            self.train_seconds.append(seconds)


def propagate_rows(
    p_prev: PropagationMatrix, y_hat: ProbabilityMatrix
) -> Tuple[PropagationMatrix, np.ndarray]:
    """
    Propagate one label for every row of ``p_prev``, see :func:`propagate`.

    :return: the new propagation state and, per row, the propagated label index or -1
    """
    p_prev = np.atleast_2d(p_prev)
    y_hat = np.atleast_2d(y_hat)
    unknown = np.isnan(p_prev)
    has_unknown = unknown.any(axis=1)

    highest = np.argmax(np.where(unknown, y_hat, -np.inf), axis=1)
    lowest = np.argmin(np.where(unknown, y_hat, np.inf), axis=1)
    rows = np.arange(p_prev.shape[0])
    chosen = np.where(y_hat[rows, highest] >= 0.5, highest, lowest)
    chosen = np.where(has_unknown, chosen, -1)

    p_next = p_prev.copy()
    changed = rows[has_unknown]
    p_next[changed, chosen[changed]] = y_hat[changed, chosen[changed]]
    return p_next, chosen


def propagate(p_prev: np.ndarray, y_hat: np.ndarray) -> np.ndarray:
    """
    Propagate one label of a single instance.

    Among the labels that are still unknown (``MISSING``), the one with the highest probability is
    propagated if that probability is at least 0.5, otherwise the one with the lowest probability.
    Ties go to the lowest label index. Known cells are never changed, and nothing changes if no label
    is unknown anymore.

    :param p_prev: propagation state of the instance, length N
    :param y_hat: predicted probabilities of the instance, length N
    :return: the new propagation state
    """
    return propagate_rows(np.asarray(p_prev, dtype=float)[None], np.asarray(y_hat)[None])[0][0]


def cumulate_rows(
    p_final: PropagationMatrix, probabilities: List[ProbabilityMatrix]
) -> np.ndarray:
    """Keep propagated cells, fill every unknown cell with its maximum probability over all rounds"""
    round_maxima = np.max(np.stack(probabilities), axis=0)
    return np.where(np.isnan(p_final), round_maxima, p_final)


def cumulate_merge(p_final: np.ndarray, trace: List[np.ndarray]) -> np.ndarray:
    """
    Cumulated prediction of a single instance.

    :param p_final: final propagation state of the instance
    :param trace: the instance's predicted probabilities of every round
    :return: ``p_final`` where known, otherwise the maximum probability over all rounds
    """
    return cumulate_rows(
        np.asarray(p_final, dtype=float)[None], [np.asarray(y)[None] for y in trace]
    )[0]


class ChainModel(AbstractMultiLabelModel):
    """A trained dynamic classifier chain, one multi-label booster per round"""

    kind = "xdcc"

    def __init__(
        self,
        rounds: List[MLBooster],
        config: BoostConfig,
        n_features: int,
        n_labels: int,
        cumulate: bool = False,
        label_names=(),
        seed: int = 0,
    ):
        super().__init__(n_features, n_labels, label_names)
        self.rounds = rounds
        self.config = config
        self.cumulate = cumulate
        self.seed = seed

    @property
    def chain_length(self) -> int:
        return len(self.rounds)

    @property
    def method(self) -> str:
        return "xdcc-cum" if self.cumulate else "xdcc"

    def predict(self, data: Union[Dataset, FeatureMatrix]) -> LabelMatrix:
        return predict_chain(self, data)[0]

    def to_dict(self) -> ModelDump:
        return {
            **self._base_dict(),
            "chain_length": self.chain_length,
            "cumulate": self.cumulate,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "rounds": [booster.dump() for booster in self.rounds],
        }

    @classmethod
    def from_dict(cls, dump: ModelDump) -> "ChainModel":
        try:
            rounds = [MLBooster.from_dump(booster) for booster in dump["rounds"]]
            if len(rounds) != dump["chain_length"]:
                raise ModelFormatError(
                    f"chain declares {dump['chain_length']} rounds, but contains {len(rounds)}"
                )
            model = cls(
                rounds,
                BoostConfig.from_dict(dump["config"]),
                int(dump["n_features"]),
                int(dump["n_labels"]),
                bool(dump["cumulate"]),
                seed=int(dump["seed"]),
            )
        except KeyError as e:
            raise ModelFormatError(f"chain dump is missing the key {e}")
        return model._restore_base(dump)


def train_chain(
    train: Dataset,
    config: Optional[BoostConfig] = None,
    chain_length: Optional[int] = None,
    seed: int = 0,
    cumulate: bool = False,
    callback: Optional[ChainCallback] = None,
) -> Tuple[ChainModel, RoundTrace]:
    """
    Train a dynamic classifier chain.

    Round ``r`` trains a booster on the label-augmented training set whose label-features hold the
    propagation state after round ``r - 1``. Cells that were propagated already are masked out of the
    training statistics. The booster then predicts the rows it was trained on, and each row propagates
    one more label.

    :param train: training set
    :param config: hyperparameters of every round's booster
    :param chain_length: number of rounds in ``[1, N]``, defaults to N
    :param seed: recorded with the model, training itself is deterministic
    :param cumulate: whether predictions merge the per-round maxima into unknown cells
    :param callback: called with ``(round_index, tree_index, grad, hess)`` before each tree is grown
    :return: the model and the training trace
    """
    config = config if config is not None else BoostConfig()
    chain_length = train.n_labels if chain_length is None else chain_length
    if not 1 <= chain_length <= train.n_labels:
        raise ValueError(
            f"chain length must be given in [1, {train.n_labels}], but you gave {chain_length}"
        )

    augmented = augment(train)
    state = np.array(augmented.label_features)
    trace = RoundTrace()
    rounds = []
    for r in range(chain_length):
        start = time.perf_counter()
        current = augmented.with_label_features(state)
        round_callback = None
        if callback is not None:
            round_callback = functools.partial(callback, r)
        booster = train_booster(current, train.labels, np.isnan(state), config, round_callback)
        probabilities = booster.predict_proba(current)
        state, propagated = propagate_rows(state, probabilities)
        seconds = time.perf_counter() - start

        rounds.append(booster)
        trace.record(probabilities, state, propagated, seconds)
        if all(len(tree.split_features()) == 0 for tree in booster.trees):
            logger.warning(f"Chain round {r + 1} did not find any split")
        logger.info(
            f"Chain round {r + 1}/{chain_length} trained in {seconds:.3f}s, "
            f"{int((~np.isnan(state)).sum())} cells propagated"
        )

    model = ChainModel(
        rounds,
        config,
        train.n_features,
        train.n_labels,
        cumulate,
        train.label_names,
        seed,
    )
    model.train_seconds = float(sum(trace.train_seconds))
    return model, trace


def predict_chain(
    model: ChainModel, test: Union[Dataset, FeatureMatrix], upto: Optional[int] = None
) -> Tuple[LabelMatrix, RoundTrace]:
    """
    Predict with a dynamic classifier chain.

    :param model: the trained chain
    :param test: test set or feature matrix
    :param upto: use only the first ``upto`` rounds, all rounds if None
    :return: binary predictions and the prediction trace
    """
    features = model._features_of(test)
    upto = model.chain_length if upto is None else upto
    if not 1 <= upto <= model.chain_length:
        raise ValueError(
            f"upto must be given in [1, {model.chain_length}], but you gave {upto}"
        )

    state = np.full((features.shape[0], model.n_labels), MISSING)
    trace = RoundTrace()
    for booster in model.rounds[:upto]:
        probabilities = booster.predict_proba(np.hstack([features, state]))
        state, propagated = propagate_rows(state, probabilities)
        trace.record(probabilities, state, propagated)

    final = cumulate_rows(state, trace.probabilities) if model.cumulate else state
    return binarize(final), trace


def round_metrics(trace: RoundTrace, truth: LabelMatrix, cumulate: bool = False) -> pd.DataFrame:
    """
    Evaluate every prefix of a chain run.

    :param trace: training or prediction trace
    :param truth: true labels of the traced instances
    :param cumulate: evaluate cumulated predictions instead of the plain propagation states
    :return: one row per round with HA, SA, F1 and the fractions of true positive and true negative
             cells that have been propagated up to that round
    """
    if trace.n_rounds == 0:
        raise ValueError("trace does not contain any rounds")
    truth = np.asarray(truth).astype(bool)
    n_positive, n_negative = truth.sum(), (~truth).sum()

    rows = []
    for r, state in enumerate(trace.states):
        final = cumulate_rows(state, trace.probabilities[: r + 1]) if cumulate else state
        predictions = binarize(final)
        propagated = ~np.isnan(state)
        rows.append(
            {
                "round": r + 1,
                "HA": hamming_accuracy(truth, predictions),
                "SA": subset_accuracy(truth, predictions),
                "F1": example_f1(truth, predictions),
                "pos_frac": (propagated & truth).sum() / n_positive if n_positive else 0.0,
                "neg_frac": (propagated & ~truth).sum() / n_negative if n_negative else 0.0,
            }
        )
    return pd.DataFrame(rows, columns=["round", "HA", "SA", "F1", "pos_frac", "neg_frac"])


def round_label_counts(trace: RoundTrace, label_names) -> pd.DataFrame:
    """Number of instances that propagated each label in each round (rows: rounds, columns: labels)"""
    counts = [
        np.bincount(propagated[propagated >= 0], minlength=len(label_names))
        for propagated in trace.propagated
    ]
    return pd.DataFrame(
        counts,
        index=pd.RangeIndex(1, trace.n_rounds + 1, name="round"),
        columns=list(label_names),
    )
