"""
Multi-label gradient boosted trees.

Every tree is fitted to per-label gradients and Hessians of the cross-entropy loss and stores a
weight vector with one entry per label in each leaf. Split candidates are scored with one of the
aggregations of :mod:`dynchain.gains`.
"""
import abc
import time
from dataclasses import dataclass, field, asdict
from typing import Callable, Iterator, List, NamedTuple, Optional, Union

import numpy as np
from scipy.special import expit

from .dataset import AugmentedDataset, Dataset
from .errors import DegenerateNodeError, ModelFormatError, WidthMismatchError
from .gains import GainStrategy, GradStats, split_gains
from .log import logger
from .types import ActiveMask, FeatureMatrix, LabelMatrix, ProbabilityMatrix, TreeDump

TrainingCallback = Callable[[int, np.ndarray, np.ndarray], None]
"""Called with ``(tree_index, grad, hess)`` before each tree is grown, ``grad`` and ``hess`` are already masked"""


@dataclass(frozen=True)
class BoostConfig:
    """Hyperparameters of a multi-label booster"""

    n_rounds: int = 10
    """number of trees"""

    max_depth: int = 5
    """maximum tree depth, 0 grows single leaves"""

    learning_rate: float = 0.3
    """shrinkage applied to every leaf weight, in (0, 1]"""

    lambda_reg: float = 1.0
    """L2 regularizer added to the Hessian sums"""

    gamma: float = 0.0
    """minimum gain a split must exceed"""

    min_child_weight: float = 1.0
    """minimum Hessian sum over all labels in each child of a split"""

    gain_strategy: GainStrategy = GainStrategy.SUM_GAIN
    """aggregation of per-label statistics used to score splits"""

    def __post_init__(self):
        if int(self.n_rounds) != self.n_rounds or self.n_rounds < 1:
            raise ValueError(f"n_rounds must be an integer >= 1, but you gave {self.n_rounds}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 0:
            raise ValueError(f"max_depth must be an integer >= 0, but you gave {self.max_depth}")
        if not 0 < self.learning_rate <= 1:
            raise ValueError(
                f"learning_rate must be given in (0, 1], but you gave {self.learning_rate}"
            )
        for name in ("lambda_reg", "gamma", "min_child_weight"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, but you gave {getattr(self, name)}")
        object.__setattr__(self, "n_rounds", int(self.n_rounds))
        object.__setattr__(self, "max_depth", int(self.max_depth))
        object.__setattr__(self, "gain_strategy", GainStrategy.from_name(self.gain_strategy))

    def to_dict(self) -> dict:
        values = asdict(self)
        values["gain_strategy"] = self.gain_strategy.value
        return values

    @classmethod
    def from_dict(cls, values: dict) -> "BoostConfig":
        return cls(**values)


def sigmoid(raw):
    """Map raw scores to probabilities, ``1 / (1 + exp(-raw))``"""
    return expit(raw)


def compute_grad_hess(y, y_raw):
    """
    First and second derivative of the cross-entropy loss
    ``-[y log(p) + (1 - y) log(1 - p)]`` with ``p = sigmoid(y_raw)`` with respect to ``y_raw``.

    :param y: binary targets, scalar or array
    :param y_raw: raw scores of the same shape
    :return: ``(p - y, p * (1 - p))``
    """
    p = sigmoid(y_raw)
    return p - y, p * (1.0 - p)


def cross_entropy(targets: LabelMatrix, raw: np.ndarray, mask: Optional[ActiveMask] = None) -> float:
    """Mean cross-entropy loss over all (active) cells, evaluated on raw scores"""
    losses = np.logaddexp(0.0, raw) - targets * raw
    if mask is not None:
        losses = losses[mask]
    return float(losses.mean()) if losses.size else 0.0


def leaf_weight(G: float, H: float, lambda_reg: float, learning_rate: float) -> float:
    """
    Optimal weight of a leaf for one label, shrunk by the learning rate: ``eta * (-G / (H + lambda))``.

    :raises DegenerateNodeError: if ``H + lambda_reg`` is zero
    """
    if H + lambda_reg <= 0:
        raise DegenerateNodeError(
            f"Hessian sum {H} plus regularizer {lambda_reg} must be positive"
        )
    return learning_rate * (-G / (H + lambda_reg))


def leaf_weights(stats: GradStats, lambda_reg: float, learning_rate: float) -> np.ndarray:
    """Leaf weight vector over all labels, labels without any Hessian mass and ``lambda = 0`` get weight 0"""
    denominator = stats.H + lambda_reg
    valid = denominator > 0
    safe = np.where(valid, denominator, 1.0)
    return np.where(valid, learning_rate * (-stats.G / safe), 0.0)


class TreeNode(metaclass=abc.ABCMeta):
    """A node of a multi-label regression tree"""

    def __init__(self, stats: GradStats):
        self.stats = stats

    @abc.abstractmethod
    def fill(self, features: FeatureMatrix, rows: np.ndarray, out: np.ndarray):
        """Write the leaf weight vector reached by each of ``rows`` into ``out``"""

    @abc.abstractmethod
    def to_dict(self) -> TreeDump:
        """Serialize the subtree rooted at this node"""

    @abc.abstractmethod
    def nodes(self) -> Iterator["TreeNode"]:
        """Iterate over all nodes of the subtree in depth-first order"""

    def predict(self, features: FeatureMatrix) -> np.ndarray:
        """Leaf weight vectors of all rows of ``features``"""
        out = np.empty((features.shape[0], len(self.stats.G)))
        self.fill(features, np.arange(features.shape[0]), out)
        return out

    def split_features(self) -> List[int]:
        """Feature indices used by the split nodes of this subtree, in depth-first order"""
        return [node.feature_index for node in self.nodes() if isinstance(node, SplitNode)]

    @staticmethod
    def from_dict(dump: TreeDump) -> "TreeNode":
        stats = GradStats(np.array(dump["G"], dtype=float), np.array(dump["H"], dtype=float))
        if "weights" in dump:
            return LeafNode(np.array(dump["weights"], dtype=float), stats)
        try:
            return SplitNode(
                int(dump["feature"]),
                float(dump["threshold"]),
                bool(dump["default_left"]),
                TreeNode.from_dict(dump["left"]),
                TreeNode.from_dict(dump["right"]),
                stats,
            )
        except KeyError as e:
            raise ModelFormatError(f"tree node is missing the key {e}")


class LeafNode(TreeNode):
    def __init__(self, weights: np.ndarray, stats: GradStats):
        super().__init__(stats)
        self.weights = weights

    @property
    def depth(self) -> int:
        return 0

    def fill(self, features: FeatureMatrix, rows: np.ndarray, out: np.ndarray):
        out[rows] = self.weights

    def nodes(self) -> Iterator[TreeNode]:
        yield self

    def to_dict(self) -> TreeDump:
        return {
            "weights": self.weights.tolist(),
            "cover": self.stats.cover,
            "G": self.stats.G.tolist(),
            "H": self.stats.H.tolist(),
        }


class SplitNode(TreeNode):
    """
    Instances with ``x[feature_index] < threshold`` go left, others go right.
    Missing values follow ``default_left``.
    """

    def __init__(
        self,
        feature_index: int,
        threshold: float,
        default_left: bool,
        left: TreeNode,
        right: TreeNode,
        stats: GradStats,
    ):
        super().__init__(stats)
        self.feature_index = feature_index
        self.threshold = threshold
        self.default_left = default_left
        self.left = left
        self.right = right

    @property
    def depth(self) -> int:
        return 1 + max(self.left.depth, self.right.depth)

    def goes_left(self, values: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(np.isnan(values), self.default_left, values < self.threshold)

    def fill(self, features: FeatureMatrix, rows: np.ndarray, out: np.ndarray):
        left = self.goes_left(features[rows, self.feature_index])
        self.left.fill(features, rows[left], out)
        self.right.fill(features, rows[~left], out)

    def nodes(self) -> Iterator[TreeNode]:
        yield self
        yield from self.left.nodes()
        yield from self.right.nodes()

    def to_dict(self) -> TreeDump:
        return {
            "feature": self.feature_index,
            "threshold": self.threshold,
            "default_left": self.default_left,
            "cover": self.stats.cover,
            "G": self.stats.G.tolist(),
            "H": self.stats.H.tolist(),
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }


class SplitCandidate(NamedTuple):
    feature_index: int
    threshold: float
    gain: float
    default_left: bool


def find_best_split(
    features: FeatureMatrix,
    instances: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    active_mask: ActiveMask,
    config: BoostConfig,
) -> Optional[SplitCandidate]:
    """
    Exact greedy split search.

    Every midpoint between two consecutive distinct present values of every feature is evaluated,
    once with missing values sent left and once with missing values sent right.
    Candidates are enumerated by feature, then threshold, then default direction (left first),
    the first candidate with the highest gain wins.

    :param features: full feature matrix, rows are selected by ``instances``
    :param instances: row indices of the node
    :param grad: per-row per-label gradients of all rows
    :param hess: per-row per-label Hessians of all rows
    :param active_mask: cells that are False contribute neither gradient nor Hessian
    :param config: regularization, ``gamma``, ``min_child_weight`` and the gain strategy
    :return: the best split or None, if no split with positive gain satisfies ``min_child_weight``
    """
    rows = np.asarray(instances, dtype=int)
    if len(rows) < 2:
        return None
    active = active_mask[rows]
    g = np.where(active, grad[rows], 0.0)
    h = np.where(active, hess[rows], 0.0)

    best: Optional[SplitCandidate] = None
    best_gain = -np.inf
    for feature_index in range(features.shape[1]):
        values = features[rows, feature_index]
        present = ~np.isnan(values)
        if present.sum() < 2:
            continue

        order = np.argsort(values[present], kind="stable")
        sorted_values = values[present][order]
        boundaries = np.nonzero(sorted_values[:-1] < sorted_values[1:])[0]
        if boundaries.size == 0:
            continue
        lower, upper = sorted_values[boundaries], sorted_values[boundaries + 1]
        thresholds = (lower + upper) / 2
        thresholds = np.where(thresholds > lower, thresholds, upper)

        g_present, h_present = g[present], h[present]
        G_cum = np.cumsum(g_present[order], axis=0)[boundaries]
        H_cum = np.cumsum(h_present[order], axis=0)[boundaries]
        G_rest = g_present.sum(axis=0) - G_cum
        H_rest = h_present.sum(axis=0) - H_cum
        G_missing = g[~present].sum(axis=0)
        H_missing = h[~present].sum(axis=0)

        # candidate order: threshold ascending, default left before default right
        G_left = np.stack([G_cum + G_missing, G_cum], axis=1).reshape(-1, g.shape[1])
        H_left = np.stack([H_cum + H_missing, H_cum], axis=1).reshape(-1, g.shape[1])
        G_right = np.stack([G_rest, G_rest + G_missing], axis=1).reshape(-1, g.shape[1])
        H_right = np.stack([H_rest, H_rest + H_missing], axis=1).reshape(-1, g.shape[1])

        gains = split_gains(
            config.gain_strategy,
            G_left,
            H_left,
            G_right,
            H_right,
            config.lambda_reg,
            config.gamma,
        )
        admissible = (H_left.sum(axis=1) >= config.min_child_weight) & (
            H_right.sum(axis=1) >= config.min_child_weight
        )
        gains = np.where(admissible, gains, -np.inf)

        candidate = int(np.argmax(gains))
        if gains[candidate] > best_gain:
            best_gain = gains[candidate]
            best = SplitCandidate(
                feature_index,
                float(thresholds[candidate // 2]),
                float(best_gain),
                candidate % 2 == 0,
            )

    if best is None or best.gain <= 0:
        return None
    return best


def _grow(
    features: FeatureMatrix,
    rows: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    active_mask: ActiveMask,
    config: BoostConfig,
    depth: int,
) -> TreeNode:
    """Grow a subtree depth-first, ``grad`` and ``hess`` are masked already"""
    stats = GradStats.from_rows(grad, hess, rows)
    if depth < config.max_depth:
        split = find_best_split(features, rows, grad, hess, active_mask, config)
        if split is not None:
            node = SplitNode(split.feature_index, split.threshold, split.default_left, None, None, stats)
            left = node.goes_left(features[rows, split.feature_index])
            logger.debug(
                f"Split {len(rows)} rows at depth {depth} on feature {split.feature_index} "
                f"< {split.threshold} with gain {split.gain}"
            )
            node.left = _grow(features, rows[left], grad, hess, active_mask, config, depth + 1)
            node.right = _grow(features, rows[~left], grad, hess, active_mask, config, depth + 1)
            return node
    return LeafNode(leaf_weights(stats, config.lambda_reg, config.learning_rate), stats)


def as_feature_matrix(data: Union[Dataset, AugmentedDataset, np.ndarray]) -> FeatureMatrix:
    """Get the feature matrix of a dataset, an augmented dataset or a plain matrix"""
    if isinstance(data, (Dataset, AugmentedDataset)):
        return data.features
    return np.atleast_2d(np.asarray(data, dtype=float))


@dataclass
class MLBooster:
    """An additive ensemble of multi-label trees"""

    trees: List[TreeNode]
    n_labels: int
    n_features: int
    config: BoostConfig = field(default_factory=BoostConfig)
    base_score: float = 0.0

    def predict_raw(self, x: Union[Dataset, AugmentedDataset, np.ndarray]) -> np.ndarray:
        """
        Sum of the base score and the reached leaf weight vectors of all trees.

        :param x: a single feature row or a matrix of rows
        :return: raw scores, a vector of length N for a single row, otherwise an ``M x N`` matrix
        """
        single_row = not isinstance(x, (Dataset, AugmentedDataset)) and np.ndim(x) == 1
        features = as_feature_matrix(x)
        if features.shape[1] != self.n_features:
            raise WidthMismatchError(
                f"model was trained on {self.n_features} features, but got {features.shape[1]}"
            )
        raw = np.full((features.shape[0], self.n_labels), self.base_score, dtype=float)
        for tree in self.trees:
            raw = raw + tree.predict(features)
        return raw[0] if single_row else raw

    def predict_proba(self, x: Union[Dataset, AugmentedDataset, np.ndarray]) -> ProbabilityMatrix:
        """Componentwise sigmoid of :meth:`predict_raw`"""
        return sigmoid(self.predict_raw(x))

    def dump(self) -> dict:
        """Self-describing tree dump including configuration and base score"""
        return {
            "n_labels": self.n_labels,
            "n_features": self.n_features,
            "base_score": self.base_score,
            "config": self.config.to_dict(),
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dump(cls, dump: dict) -> "MLBooster":
        try:
            return cls(
                trees=[TreeNode.from_dict(tree) for tree in dump["trees"]],
                n_labels=int(dump["n_labels"]),
                n_features=int(dump["n_features"]),
                config=BoostConfig.from_dict(dump["config"]),
                base_score=float(dump["base_score"]),
            )
        except KeyError as e:
            raise ModelFormatError(f"booster dump is missing the key {e}")


def train_booster(
    data: Union[Dataset, AugmentedDataset, np.ndarray],
    targets: LabelMatrix,
    active_mask: Optional[ActiveMask] = None,
    config: Optional[BoostConfig] = None,
    callback: Optional[TrainingCallback] = None,
) -> MLBooster:
    """
    Train a multi-label booster on the cross-entropy loss of every label.

    :param data: the training features, optionally label-augmented
    :param targets: ``M x N`` binary target matrix
    :param active_mask: ``M x N`` booleans, cells that are False get zero gradient and Hessian.
           All cells are active if None.
    :param config: hyperparameters, defaults to ``BoostConfig()``
    :param callback: called before each tree with the masked gradients and Hessians
    :return: the trained booster
    """
    config = config if config is not None else BoostConfig()
    features = as_feature_matrix(data)
    targets = np.asarray(targets)
    if targets.ndim == 1:
        targets = targets[:, None]
    if targets.shape[0] != features.shape[0]:
        raise ValueError(
            f"targets have {targets.shape[0]} rows, but features have {features.shape[0]}"
        )
    if not np.isin(targets, (0, 1)).all():
        raise ValueError("targets must be binary, i.e., 0 or 1")
    targets = targets.astype(float)
    if active_mask is None:
        active_mask = np.ones(targets.shape, dtype=bool)
    active_mask = np.asarray(active_mask, dtype=bool)
    if active_mask.shape != targets.shape:
        raise ValueError(
            f"active mask has shape {active_mask.shape}, but targets have {targets.shape}"
        )

    booster = MLBooster([], targets.shape[1], features.shape[1], config)
    raw = np.full(targets.shape, booster.base_score, dtype=float)
    all_rows = np.arange(features.shape[0])
    start = time.perf_counter()
    for tree_index in range(config.n_rounds):
        grad, hess = compute_grad_hess(targets, raw)
        grad = np.where(active_mask, grad, 0.0)
        hess = np.where(active_mask, hess, 0.0)
        if callback is not None:
            callback(tree_index, grad, hess)

        tree = _grow(features, all_rows, grad, hess, active_mask, config, 0)
        booster.trees.append(tree)
        raw = raw + tree.predict(features)
        logger.debug(
            f"Tree {tree_index}: depth {tree.depth}, "
            f"loss {cross_entropy(targets, raw, active_mask)}"
        )
    logger.info(
        f"Trained {config.n_rounds} trees for {targets.shape[1]} labels "
        f"on {features.shape[0]}x{features.shape[1]} features "
        f"in {time.perf_counter() - start:.3f}s"
    )
    return booster
