"""Example-based multi-label evaluation measures. All measures are averaged over instances, higher is better."""
import numpy as np

from .errors import WidthMismatchError
from .types import LabelMatrix


def _check_shapes(Y: LabelMatrix, Y_hat: LabelMatrix):
    Y, Y_hat = np.atleast_2d(np.asarray(Y)), np.atleast_2d(np.asarray(Y_hat))
    if Y.shape != Y_hat.shape:
        raise WidthMismatchError(
            f"truth has shape {Y.shape}, but predictions have shape {Y_hat.shape}"
        )
    if Y.shape[0] == 0:
        raise ValueError("cannot evaluate zero instances")
    return Y.astype(bool), Y_hat.astype(bool)


def hamming_accuracy(Y: LabelMatrix, Y_hat: LabelMatrix) -> float:
    """Fraction of correctly predicted labels per instance, averaged over instances"""
    Y, Y_hat = _check_shapes(Y, Y_hat)
    return float((Y == Y_hat).mean(axis=1).mean())


def subset_accuracy(Y: LabelMatrix, Y_hat: LabelMatrix) -> float:
    """Fraction of instances whose label vector is predicted exactly"""
    Y, Y_hat = _check_shapes(Y, Y_hat)
    return float((Y == Y_hat).all(axis=1).mean())


def example_f1(Y: LabelMatrix, Y_hat: LabelMatrix, empty_score: float = 1.0) -> float:
    """
    Example-based F1, ``2 * |y & y_hat| / (|y| + |y_hat|)`` averaged over instances.

    :param empty_score: score of an instance without true and without predicted labels
    """
    Y, Y_hat = _check_shapes(Y, Y_hat)
    overlap = (Y & Y_hat).sum(axis=1)
    size = Y.sum(axis=1) + Y_hat.sum(axis=1)
    scores = np.where(size > 0, 2 * overlap / np.maximum(size, 1), empty_score)
    return float(scores.mean())


def per_label_accuracy(Y: LabelMatrix, Y_hat: LabelMatrix) -> np.ndarray:
    """Accuracy of each label column"""
    Y, Y_hat = _check_shapes(Y, Y_hat)
    return (Y == Y_hat).mean(axis=0)
