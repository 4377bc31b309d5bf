import abc
from typing import Sequence, Union

import numpy as np

from .dataset import Dataset
from .errors import WidthMismatchError
from .types import FeatureMatrix, LabelMatrix, ModelDump


class AbstractMultiLabelModel(metaclass=abc.ABCMeta):
    """
    Super class for trained multi-label models.
    Implementations are the single multi-label booster, binary relevance, classifier chains
    and dynamic classifier chains. All of them consume the same datasets and emit ``M x N`` binary matrices.
    """

    kind: str = None
    """identifier of the model type in model dumps"""

    def __init__(self, n_features: int, n_labels: int, label_names: Sequence[str] = ()):
        self.n_features = n_features
        self.n_labels = n_labels
        self.label_names = tuple(label_names)
        self.train_seconds = 0.0

    @property
    def method(self) -> str:
        """Name of the method, as used on the command line"""
        return self.kind

    @abc.abstractmethod
    def predict(self, data: Union[Dataset, FeatureMatrix]) -> LabelMatrix:
        """Predict a binary label matrix for all instances of ``data``"""

    @abc.abstractmethod
    def to_dict(self) -> ModelDump:
        """Serialize the model into a JSON compatible dictionary, including the ``kind`` key"""

    @classmethod
    @abc.abstractmethod
    def from_dict(cls, dump: ModelDump) -> "AbstractMultiLabelModel":
        """Restore a model from :meth:`to_dict` output"""

    def _base_dict(self) -> ModelDump:
        return {
            "kind": self.kind,
            "n_features": self.n_features,
            "n_labels": self.n_labels,
            "label_names": list(self.label_names),
            "train_seconds": self.train_seconds,
        }

    def _restore_base(self, dump: ModelDump):
        self.label_names = tuple(dump.get("label_names", ()))
        self.train_seconds = float(dump.get("train_seconds", 0.0))
        return self

    def _features_of(self, data: Union[Dataset, FeatureMatrix]) -> FeatureMatrix:
        """Get the feature matrix of ``data`` and verify it has the trained width"""
        features = data.features if isinstance(data, Dataset) else np.atleast_2d(data)
        if features.shape[1] != self.n_features:
            raise WidthMismatchError(
                f"{self.method} model was trained on {self.n_features} features, "
                f"but got {features.shape[1]}"
            )
        return np.asarray(features, dtype=float)


def binarize(probabilities: np.ndarray) -> LabelMatrix:
    """Probabilities ``>= 0.5`` become 1, smaller or missing probabilities become 0"""
    with np.errstate(invalid="ignore"):
        return np.where(np.isnan(probabilities), False, probabilities >= 0.5).astype(np.int8)
