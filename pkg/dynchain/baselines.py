"""
Reference methods built on the same booster: a single multi-label booster, binary relevance and
classifier chains with a random label order.
"""
from typing import List, Optional, Sequence, Union

import numpy as np

from .abstract_model import AbstractMultiLabelModel, binarize
from .booster import BoostConfig, MLBooster, train_booster
from .dataset import Dataset
from .errors import ModelFormatError
from .log import logger
from .types import FeatureMatrix, LabelMatrix, ModelDump, ProbabilityMatrix


class MLXGBModel(AbstractMultiLabelModel):
    """A single multi-label booster, predicting all labels at once"""

    kind = "mlxgb"

    def __init__(self, booster: MLBooster, label_names=()):
        super().__init__(booster.n_features, booster.n_labels, label_names)
        self.booster = booster

    def predict_proba(self, data: Union[Dataset, FeatureMatrix]) -> ProbabilityMatrix:
        return self.booster.predict_proba(self._features_of(data))

    def predict(self, data: Union[Dataset, FeatureMatrix]) -> LabelMatrix:
        return binarize(self.predict_proba(data))

    def to_dict(self) -> ModelDump:
        return {**self._base_dict(), "booster": self.booster.dump()}

    @classmethod
    def from_dict(cls, dump: ModelDump) -> "MLXGBModel":
        try:
            return cls(MLBooster.from_dump(dump["booster"]))._restore_base(dump)
        except KeyError as e:
            raise ModelFormatError(f"mlxgb dump is missing the key {e}")


class BRModel(AbstractMultiLabelModel):
    """Binary relevance: one independent single-label booster per label"""

    kind = "br"

    def __init__(self, models: List[MLBooster], n_features: int, label_names=()):
        super().__init__(n_features, len(models), label_names)
        self.models = models

    def predict_proba(self, data: Union[Dataset, FeatureMatrix]) -> ProbabilityMatrix:
        features = self._features_of(data)
        return np.hstack([model.predict_proba(features) for model in self.models])

    def predict(self, data: Union[Dataset, FeatureMatrix]) -> LabelMatrix:
        return binarize(self.predict_proba(data))

    def to_dict(self) -> ModelDump:
        return {**self._base_dict(), "models": [model.dump() for model in self.models]}

    @classmethod
    def from_dict(cls, dump: ModelDump) -> "BRModel":
        try:
            models = [MLBooster.from_dump(model) for model in dump["models"]]
            return cls(models, int(dump["n_features"]))._restore_base(dump)
        except KeyError as e:
            raise ModelFormatError(f"br dump is missing the key {e}")


class CCModel(AbstractMultiLabelModel):
    """
    Classifier chain: single-label boosters in a fixed label order.
    The booster at position ``j`` sees the original features plus the binarized predictions
    of the ``j`` boosters before it.
    """

    kind = "cc"

    def __init__(
        self,
        models: List[MLBooster],
        order: Sequence[int],
        n_features: int,
        seed: int = 0,
        label_names=(),
    ):
        super().__init__(n_features, len(models), label_names)
        self.models = models
        self.order = [int(label) for label in order]
        self.seed = seed

    def predict(self, data: Union[Dataset, FeatureMatrix]) -> LabelMatrix:
        return predict_cc(self, data)

    def to_dict(self) -> ModelDump:
        return {
            **self._base_dict(),
            "order": self.order,
            "seed": self.seed,
            "models": [model.dump() for model in self.models],
        }

    @classmethod
    def from_dict(cls, dump: ModelDump) -> "CCModel":
        try:
            models = [MLBooster.from_dump(model) for model in dump["models"]]
            return cls(
                models, dump["order"], int(dump["n_features"]), int(dump["seed"])
            )._restore_base(dump)
        except KeyError as e:
            raise ModelFormatError(f"cc dump is missing the key {e}")


def train_mlxgb(train: Dataset, config: Optional[BoostConfig] = None) -> MLXGBModel:
    """Train one multi-label booster on all labels"""
    booster = train_booster(train, train.labels, config=config)
    return MLXGBModel(booster, train.label_names)


def train_br(train: Dataset, config: Optional[BoostConfig] = None) -> BRModel:
    """Train one single-label booster per label, each on its own label column only"""
    models = []
    for j in range(train.n_labels):
        logger.debug(f"Binary relevance: training label {train.label_names[j]}")
        models.append(train_booster(train.features, train.labels[:, [j]], config=config))
    return BRModel(models, train.n_features, train.label_names)


def train_cc(train: Dataset, config: Optional[BoostConfig] = None, seed: int = 0) -> CCModel:
    """
    Train a classifier chain in a seeded random label order.
    Chain features are the binarized predictions of the previous boosters on the training rows.
    """
    order = np.random.default_rng(seed).permutation(train.n_labels)
    logger.info(f"Classifier chain order: {[train.label_names[j] for j in order]}")

    features = np.array(train.features)
    models = []
    for label in order:
        booster = train_booster(features, train.labels[:, [label]], config=config)
        predictions = binarize(booster.predict_proba(features)).astype(float)
        features = np.hstack([features, predictions])
        models.append(booster)
    return CCModel(models, order, train.n_features, seed, train.label_names)


def predict_cc(model: CCModel, test: Union[Dataset, FeatureMatrix]) -> LabelMatrix:
    """Predict along the chain order, feeding binarized predictions forward, and restore the label order"""
    features = model._features_of(test)
    predictions = np.zeros((features.shape[0], model.n_labels), dtype=np.int8)
    for booster, label in zip(model.models, model.order):
        column = binarize(booster.predict_proba(features))
        predictions[:, label] = column[:, 0]
        features = np.hstack([features, column.astype(float)])
    return predictions
