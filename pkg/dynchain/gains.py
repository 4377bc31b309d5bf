"""
Node scores that aggregate per-label gradient statistics into a single split criterion.

With ``q_j = G_j^2 / (H_j + lambda)`` and ``w_j = -G_j / (H_j + lambda)`` the strategies score a node as

============  =================
sumGain       ``sum_j q_j``
maxGain       ``max_j q_j``
sumWeight     ``sum_j w_j``
maxWeight     ``max_j w_j``
sumAbsG       ``sum_j |w_j|``
maxAbsG       ``max_j |w_j|``
============  =================
"""
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class GainStrategy(str, Enum):
    SUM_GAIN = "sumGain"
    MAX_GAIN = "maxGain"
    SUM_WEIGHT = "sumWeight"
    MAX_WEIGHT = "maxWeight"
    SUM_ABS_G = "sumAbsG"
    MAX_ABS_G = "maxAbsG"

    @classmethod
    def from_name(cls, name: str) -> "GainStrategy":
        """
        Look up a strategy by its name. The aliases ``sumGrad``, ``avgGrad`` and ``maxGrad``
        refer to ``sumWeight``, ``sumWeight`` and ``maxWeight``.
        """
        if isinstance(name, GainStrategy):
            return name
        lookup = {strategy.value.lower(): strategy for strategy in cls}
        lookup.update({alias.lower(): target for alias, target in GAIN_ALIASES.items()})
        try:
            return lookup[str(name).strip().lower()]
        except KeyError:
            raise ValueError(
                f"gain strategy must be one of {[s.value for s in cls]} "
                f"or {list(GAIN_ALIASES)}, but you gave {name}"
            )

    @property
    def gain_factor(self) -> float:
        """Factor in front of the score difference of a split, one half for the gain based strategies"""
        return 0.5 if self in (GainStrategy.SUM_GAIN, GainStrategy.MAX_GAIN) else 1.0

    @property
    def is_max(self) -> bool:
        return self.value.startswith("max")


GAIN_ALIASES = {
    "sumGrad": GainStrategy.SUM_WEIGHT,
    "avgGrad": GainStrategy.SUM_WEIGHT,
    "maxGrad": GainStrategy.MAX_WEIGHT,
}


@dataclass
class GradStats:
    """Per-label sums of gradients ``G`` and Hessians ``H`` over a set of instances"""

    G: np.ndarray
    H: np.ndarray

    @classmethod
    def zeros(cls, n_labels: int) -> "GradStats":
        return cls(np.zeros(n_labels), np.zeros(n_labels))

    @classmethod
    def from_rows(
        cls, grad: np.ndarray, hess: np.ndarray, rows: Sequence[int]
    ) -> "GradStats":
        """Sum the statistics of the given rows, in row order"""
        rows = np.asarray(rows, dtype=int)
        return cls(grad[rows].sum(axis=0), hess[rows].sum(axis=0))

    def __add__(self, other: "GradStats") -> "GradStats":
        return GradStats(self.G + other.G, self.H + other.H)

    @property
    def cover(self) -> float:
        """Hessian sum over all labels"""
        return float(self.H.sum())


def _aggregate(values: np.ndarray, is_max: bool) -> np.ndarray:
    if is_max:
        return values.max(axis=-1)
    # sequential accumulation, equal for one candidate and for a batch of candidates
    return np.cumsum(values, axis=-1)[..., -1]


def node_scores(
    strategy: GainStrategy, G: np.ndarray, H: np.ndarray, lambda_reg: float
) -> np.ndarray:
    """
    Score a batch of nodes at once.

    :param strategy: the aggregation over labels
    :param G: gradient sums, shape ``(..., N)``
    :param H: Hessian sums, shape ``(..., N)``
    :param lambda_reg: L2 leaf regularizer
    :return: one score per node, shape ``(...)``. Labels with ``H_j + lambda = 0`` score 0.
    """
    strategy = GainStrategy.from_name(strategy)
    denominator = H + lambda_reg
    valid = denominator > 0
    safe = np.where(valid, denominator, 1.0)

    if strategy in (GainStrategy.SUM_GAIN, GainStrategy.MAX_GAIN):
        per_label = np.where(valid, G * G / safe, 0.0)
    else:
        per_label = np.where(valid, -G / safe, 0.0)
        if strategy in (GainStrategy.SUM_ABS_G, GainStrategy.MAX_ABS_G):
            per_label = np.abs(per_label)
    return _aggregate(per_label, strategy.is_max)


def split_gains(
    strategy: GainStrategy,
    G_left: np.ndarray,
    H_left: np.ndarray,
    G_right: np.ndarray,
    H_right: np.ndarray,
    lambda_reg: float,
    gamma: float,
) -> np.ndarray:
    """Batched version of :func:`split_gain`, all statistics have shape ``(..., N)``"""
    strategy = GainStrategy.from_name(strategy)
    score_left = node_scores(strategy, G_left, H_left, lambda_reg)
    score_right = node_scores(strategy, G_right, H_right, lambda_reg)
    score_parent = node_scores(strategy, G_left + G_right, H_left + H_right, lambda_reg)
    return strategy.gain_factor * (score_left + score_right - score_parent) - gamma


def node_score(strategy: GainStrategy, stats: GradStats, lambda_reg: float) -> float:
    """
    Score the instance set described by ``stats``.

    :param strategy: one of the six :class:`GainStrategy` values or its name
    :param stats: per-label gradient and Hessian sums of the node
    :param lambda_reg: L2 leaf regularizer, ``H_j + lambda_reg`` must be positive for every label
    :return: the node score
    """
    return float(
        node_scores(strategy, np.asarray(stats.G)[None], np.asarray(stats.H)[None], lambda_reg)[0]
    )


def split_gain(
    strategy: GainStrategy,
    left: GradStats,
    right: GradStats,
    lambda_reg: float,
    gamma: float,
) -> float:
    """
    Gain of splitting ``left + right`` into ``left`` and ``right``:
    ``c * (S(left) + S(right) - S(left + right)) - gamma`` with ``c = 1/2`` for sumGain and maxGain, else 1.
    """
    return float(
        split_gains(
            strategy,
            np.asarray(left.G)[None],
            np.asarray(left.H)[None],
            np.asarray(right.G)[None],
            np.asarray(right.H)[None],
            lambda_reg,
            gamma,
        )[0]
    )
