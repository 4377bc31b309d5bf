"""Seeded synthetic datasets and gradient statistics shared by the tests"""
from typing import Tuple

import numpy as np

from dynchain import Dataset


def make_separable(n_rows: int = 20, seed: int = 0) -> Dataset:
    """Single-label set whose label is ``x0 > 0``, with a margin of 0.1 around the boundary"""
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1, 1, size=(n_rows, 2))
    features[:, 0] += np.where(features[:, 0] >= 0, 0.1, -0.1)
    features[0, 0], features[1, 0] = 0.5, -0.5
    labels = (features[:, 0] > 0).astype(int)[:, None]
    return Dataset(features, labels)


def make_threshold_labels(
    n_rows: int = 200, n_features: int = 6, n_labels: int = 4, seed: int = 0
) -> Dataset:
    """Label ``j`` is positive iff ``x_j > 0.3``, the remaining features are noise"""
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1, 1, size=(n_rows, n_features))
    labels = (features[:, :n_labels] > 0.3).astype(int)
    return Dataset(features, labels)


def make_dependent_labels(n_rows: int = 300, seed: int = 0) -> Dataset:
    """
    Six labels with dependencies: labels 0-2 are thresholds of single features,
    label 3 copies label 0, label 4 is the AND of labels 1 and 2, label 5 is rare noise.
    Some feature values are missing.
    """
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1, 1, size=(n_rows, 5))
    labels = np.zeros((n_rows, 6), dtype=int)
    labels[:, 0] = features[:, 0] > 0.2
    labels[:, 1] = features[:, 1] > 0.0
    labels[:, 2] = features[:, 2] > -0.2
    labels[:, 3] = labels[:, 0]
    labels[:, 4] = labels[:, 1] & labels[:, 2]
    labels[:, 5] = rng.uniform(size=n_rows) < 0.05
    features[rng.uniform(size=features.shape) < 0.05] = np.nan
    return Dataset(features, labels)


def make_and_copy_labels(n_rows: int = 80, seed: int = 0) -> Dataset:
    """Two identical labels, both the AND of ``x0 > 0`` and ``x1 > 0``, plus a noise feature"""
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1, 1, size=(n_rows, 3))
    label = (features[:, 0] > 0) & (features[:, 1] > 0)
    return Dataset(features, np.column_stack([label, label]).astype(int))


def make_random_dataset(
    rng: np.random.Generator, n_rows: int, n_features: int, n_labels: int
) -> Dataset:
    """Random features with repeated values and missing cells, random labels"""
    features = rng.integers(0, 6, size=(n_rows, n_features)).astype(float) / 2
    features[rng.uniform(size=features.shape) < 0.15] = np.nan
    labels = rng.integers(0, 2, size=(n_rows, n_labels))
    return Dataset(features, labels)


def make_dyadic_stats(
    rng: np.random.Generator, n_rows: int, n_labels: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Random gradients in [-1, 1] and Hessians in [0, 1/4], all multiples of 1/64.
    Sums of these values are exact in any order.
    """
    grad = rng.integers(-64, 65, size=(n_rows, n_labels)) / 64
    hess = rng.integers(0, 17, size=(n_rows, n_labels)) / 64
    return grad, hess
