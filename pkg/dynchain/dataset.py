"""Loading, splitting and label-augmentation of multi-label datasets."""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.sparse

from .errors import DatasetParseError, EmptyDatasetError
from .log import logger
from .types import MISSING, FeatureMatrix, LabelMatrix, PropagationMatrix

FORMATS = ("mlc-csv", "svmlight-ml")
"""On-disk formats understood by :func:`load_dataset`"""


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    A multi-label dataset: ``M`` instances with ``K`` features and ``N`` binary labels.
    Missing feature values are stored as ``MISSING``. Instances are immutable after construction.
    """

    features: FeatureMatrix
    labels: LabelMatrix
    feature_names: Tuple[str, ...] = field(default=())
    label_names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels)
        if features.ndim != 2 or labels.ndim != 2:
            raise ValueError("features and labels must be two-dimensional matrices")
        if features.shape[0] != labels.shape[0]:
            raise ValueError(
                f"features have {features.shape[0]} rows, but labels have {labels.shape[0]}"
            )
        if features.shape[0] < 1 or features.shape[1] < 1 or labels.shape[1] < 1:
            raise ValueError(
                f"a dataset needs at least one instance, feature and label, "
                f"but got shapes {features.shape} and {labels.shape}"
            )
        if np.isinf(features).any():
            raise ValueError("feature values must be finite or MISSING")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be binary, i.e., 0 or 1")

        feature_names = tuple(self.feature_names) or tuple(
            f"f{k}" for k in range(features.shape[1])
        )
        label_names = tuple(self.label_names) or tuple(
            f"l{j}" for j in range(labels.shape[1])
        )
        if len(feature_names) != features.shape[1]:
            raise ValueError("need exactly one name per feature column")
        if len(label_names) != labels.shape[1]:
            raise ValueError("need exactly one name per label column")

        object.__setattr__(self, "features", _read_only(features))
        object.__setattr__(self, "labels", _read_only(labels.astype(np.int8)))
        object.__setattr__(self, "feature_names", feature_names)
        object.__setattr__(self, "label_names", label_names)

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]

    @property
    def label_cardinality(self) -> float:
        """Average number of positive labels per instance"""
        return float(self.labels.sum(axis=1).mean())

    @property
    def n_distinct_labelsets(self) -> int:
        """Number of distinct label combinations"""
        return len(np.unique(self.labels, axis=0))

    def subset(self, rows: Sequence[int]) -> "Dataset":
        """Return a new dataset containing the given rows, in the given order"""
        rows = np.asarray(rows, dtype=int)
        return Dataset(
            self.features[rows],
            self.labels[rows],
            self.feature_names,
            self.label_names,
        )

    def equals(self, other: "Dataset") -> bool:
        """Test whether two datasets contain the same names, labels and features (missing values match each other)"""
        return (
            self.feature_names == other.feature_names
            and self.label_names == other.label_names
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.features, other.features, equal_nan=True)
        )


@dataclass(frozen=True, eq=False)
class AugmentedDataset:
    """
    A dataset whose feature space is extended by one label-feature per label.
    Learners see ``K + N`` columns, the label-features occupy the trailing ``N`` columns in label order.
    """

    base: Dataset
    label_features: PropagationMatrix

    def __post_init__(self):
        label_features = np.asarray(self.label_features, dtype=float)
        expected = (self.base.n_instances, self.base.n_labels)
        if label_features.shape != expected:
            raise ValueError(
                f"label features must have shape {expected}, but have {label_features.shape}"
            )
        present = label_features[~np.isnan(label_features)]
        if ((present < 0) | (present > 1)).any():
            raise ValueError("label features must be probabilities in [0, 1] or MISSING")
        object.__setattr__(self, "label_features", _read_only(label_features))

    @property
    def features(self) -> FeatureMatrix:
        """The ``M x (K + N)`` feature matrix presented to learners"""
        return np.hstack([self.base.features, self.label_features])

    @property
    def labels(self) -> LabelMatrix:
        return self.base.labels

    @property
    def n_columns(self) -> int:
        return self.base.n_features + self.base.n_labels

    def with_label_features(self, label_features: PropagationMatrix) -> "AugmentedDataset":
        """Return a copy with replaced label-features, the base dataset is shared"""
        return AugmentedDataset(self.base, label_features)


def augment(d: Dataset) -> AugmentedDataset:
    """Add one label-feature per label to the dataset, every label-feature is initialized as missing"""
    return AugmentedDataset(d, np.full((d.n_instances, d.n_labels), MISSING))


def split_holdout(d: Dataset, fraction: float, seed: int) -> Tuple[Dataset, Dataset]:
    """
    Randomly partition the rows of a dataset into a training part and a holdout part.

    :param d: the dataset to split
    :param fraction: share of rows that go to the holdout part, in (0, 1)
    :param seed: seed of the random permutation, equal seeds give equal partitions
    :return: the training part with ``ceil((1 - fraction) * M)`` rows and the holdout part with the remainder.
             Both parts keep the original row order.
    """
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must be given in (0, 1), but you gave {fraction}")
    n_train = math.ceil(round((1 - fraction) * d.n_instances, 9))
    if n_train >= d.n_instances:
        raise ValueError(
            f"fraction {fraction} of {d.n_instances} instances leaves an empty holdout set"
        )

    permutation = np.random.default_rng(seed).permutation(d.n_instances)
    train_rows = np.sort(permutation[:n_train])
    holdout_rows = np.sort(permutation[n_train:])
    logger.debug(
        f"Split {d.n_instances} instances into {len(train_rows)} + {len(holdout_rows)}"
    )
    return d.subset(train_rows), d.subset(holdout_rows)


def _parse_float(cell: str, line_number: int) -> float:
    cell = cell.strip()
    if cell == "":
        return MISSING
    try:
        value = float(cell)
    except ValueError:
        raise DatasetParseError(f"line {line_number}: cannot parse number `{cell}`")
    if not math.isfinite(value):
        raise DatasetParseError(f"line {line_number}: number `{cell}` is not finite")
    return value


def _parse_label(cell: str, line_number: int) -> int:
    cell = cell.strip()
    if cell not in ("0", "1"):
        raise DatasetParseError(
            f"line {line_number}: label value must be 0 or 1, but is `{cell}`"
        )
    return int(cell)


_OVERFLOW = "\x00overflow:"


def _mark_overflow(fields: List[str]) -> List[str]:
    """Keep rows with too many cells in place, so their line number can be reported"""
    return [f"{_OVERFLOW}{len(fields)}"]


def _row_problem(row: pd.Series, line_number: int, n_features: int) -> str:
    cells = row.tolist()
    first = cells[0]
    if isinstance(first, str) and first.startswith(_OVERFLOW):
        return f"line {line_number}: expected {len(cells)} cells, found {first[len(_OVERFLOW):]}"
    if row.isna().any():
        return f"line {line_number}: expected {len(cells)} cells, found {int(row.notna().sum())}"
    for cell in cells[:n_features]:
        _parse_float(cell, line_number)
    for cell in cells[n_features:]:
        _parse_label(cell, line_number)
    return f"line {line_number}: cannot parse row"


def _load_mlc_csv(path: str) -> Dataset:
    with open(path, encoding="utf-8") as handle:
        meta_line = handle.readline()
    if meta_line == "":
        raise EmptyDatasetError(f"{path} is empty")
    meta_cell = meta_line.strip()
    if not meta_cell.startswith("#labels="):
        raise DatasetParseError(
            f"line 1: expected a `#labels=N` metadata line, found `{meta_cell}`"
        )
    try:
        n_labels = int(meta_cell[len("#labels="):])
    except ValueError:
        raise DatasetParseError(f"line 1: cannot parse label count in `{meta_cell}`")

    # header=None keeps the header as row 0, so row ``i`` sits on line ``i + 2``
    try:
        table = pd.read_csv(
            path,
            skiprows=1,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            engine="python",
            on_bad_lines=_mark_overflow,
        )
    except pd.errors.EmptyDataError:
        raise EmptyDatasetError(f"{path} has no header line")

    header = [str(name).strip() for name in table.iloc[0]]
    n_columns = len(header)
    if not 1 <= n_labels < n_columns:
        raise DatasetParseError(
            f"line 2: header has {n_columns} columns, which does not fit {n_labels} labels"
        )
    n_features = n_columns - n_labels

    body = table.iloc[1:]
    line_numbers = np.arange(len(body)) + 3
    blank = body.isna().all(axis="columns").to_numpy()
    body, line_numbers = body[~blank], line_numbers[~blank]
    if len(body) == 0:
        raise EmptyDatasetError(f"{path} does not contain any instances")

    feature_cells = body.iloc[:, :n_features].apply(lambda column: column.str.strip())
    label_cells = body.iloc[:, n_features:].apply(lambda column: column.str.strip())
    features = feature_cells.apply(pd.to_numeric, errors="coerce")
    bad = (
        body.isna().any(axis="columns")
        | body.iloc[:, 0].str.startswith(_OVERFLOW, na=False)
        | (features.isna() & (feature_cells != "")).any(axis="columns")
        | np.isinf(features).any(axis="columns")
        | ~label_cells.isin(["0", "1"]).all(axis="columns")
    ).to_numpy()
    if bad.any():
        position = int(np.argmax(bad))
        raise DatasetParseError(
            _row_problem(body.iloc[position], int(line_numbers[position]), n_features)
        )

    return Dataset(
        features.to_numpy(dtype=float),
        label_cells.astype(int).to_numpy(dtype=np.int8),
        tuple(header[:n_features]),
        tuple(header[n_features:]),
    )


def _load_svmlight_ml(path: str, n_labels: Optional[int], n_features: Optional[int]) -> Dataset:
    label_rows: List[List[int]] = []
    indptr, indices, values = [0], [], []

    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            tokens = line.split()
            if len(tokens) == 0:
                continue

            label_token = tokens[0]
            if label_token == "-":
                positives = []
            else:
                try:
                    positives = [int(t) for t in label_token.split(",")]
                except ValueError:
                    raise DatasetParseError(
                        f"line {line_number}: cannot parse label indices `{label_token}`"
                    )
                if min(positives) < 0:
                    raise DatasetParseError(
                        f"line {line_number}: label indices must be non-negative"
                    )
                if n_labels is not None and max(positives) >= n_labels:
                    raise DatasetParseError(
                        f"line {line_number}: label index {max(positives)} exceeds {n_labels} labels"
                    )
            label_rows.append(positives)

            previous = -1
            for pair in tokens[1:]:
                index, _, value = pair.partition(":")
                try:
                    index = int(index)
                except ValueError:
                    raise DatasetParseError(
                        f"line {line_number}: cannot parse feature index in `{pair}`"
                    )
                if index <= previous:
                    raise DatasetParseError(
                        f"line {line_number}: feature indices must be strictly ascending"
                    )
                if n_features is not None and index >= n_features:
                    raise DatasetParseError(
                        f"line {line_number}: feature index {index} exceeds {n_features} features"
                    )
                value = _parse_float(value, line_number)
                if math.isnan(value):
                    raise DatasetParseError(
                        f"line {line_number}: feature `{pair}` has no value"
                    )
                indices.append(index)
                values.append(value)
                previous = index
            indptr.append(len(indices))

    if len(label_rows) == 0:
        raise EmptyDatasetError(f"{path} does not contain any instances")

    if n_labels is None:
        n_labels = 1 + max((max(row) for row in label_rows if row), default=0)
    if n_features is None:
        n_features = 1 + max(indices, default=0)

    sparse = scipy.sparse.csr_matrix(
        (np.array(values, dtype=float), np.array(indices, dtype=int), np.array(indptr)),
        shape=(len(label_rows), n_features),
    )
    labels = np.zeros((len(label_rows), n_labels), dtype=np.int8)
    for row, positives in enumerate(label_rows):
        labels[row, positives] = 1
    return Dataset(sparse.toarray(), labels)


def load_dataset(
    path: str,
    format: str = "mlc-csv",
    n_labels: Optional[int] = None,
    n_features: Optional[int] = None,
) -> Dataset:
    """
    Load a multi-label dataset from a file. Row order is preserved.

    ``mlc-csv`` files start with a ``#labels=N`` line followed by a header, the last ``N`` columns hold
    the labels and empty feature cells are missing values.
    ``svmlight-ml`` lines hold comma separated positive label indices (``-`` for none), followed by
    ``index:value`` pairs in ascending order, absent indices have the value 0.

    :param path: the file to read
    :param format: ``mlc-csv`` or ``svmlight-ml``
    :param n_labels: number of labels for ``svmlight-ml`` files, inferred from the largest label index if None
    :param n_features: number of features for ``svmlight-ml`` files, inferred from the largest feature index
        if None. Test files must pass the training width, their highest features may all be absent.
    :return: the loaded dataset
    """
    if format == "mlc-csv":
        dataset = _load_mlc_csv(path)
    elif format == "svmlight-ml":
        dataset = _load_svmlight_ml(path, n_labels, n_features)
    else:
        raise ValueError(f"format must be one of {FORMATS}, but you gave {format}")
    logger.info(
        f"Loaded {path}: {dataset.n_instances} instances, "
        f"{dataset.n_features} features, {dataset.n_labels} labels"
    )
    return dataset


def save_dataset(d: Dataset, path: str):
    """
    Write a dataset in the ``mlc-csv`` format. Loading the file again yields an equal dataset.

    :param d: the dataset to write
    :param path: target file
    """
    table = pd.concat(
        [
            pd.DataFrame(d.features, columns=list(d.feature_names)),
            pd.DataFrame(d.labels.astype(int), columns=list(d.label_names)),
        ],
        axis="columns",
    )
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(f"#labels={d.n_labels}\n")
        table.to_csv(handle, index=False, na_rep="")
