import numpy as np
import pytest

from dynchain import (
    AugmentedDataset,
    Dataset,
    DatasetParseError,
    EmptyDatasetError,
    augment,
    load_dataset,
    save_dataset,
    split_holdout,
)
from tests.toy_data import make_dependent_labels


def _write(path, text: str) -> str:
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_mlc_csv(tmp_path):
    file = _write(
        tmp_path / "toy.csv",
        "#labels=2\n"
        "a,b,sad,happy\n"
        "0.5,1,0,1\n"
        ",2.25,1,1\n"
        "-3,,0,0\n",
    )
    dataset = load_dataset(file, "mlc-csv")

    assert dataset.n_instances == 3, "should have one instance per data line"
    assert dataset.n_features == 2 and dataset.n_labels == 2, "arity follows the header"
    assert dataset.feature_names == ("a", "b")
    assert dataset.label_names == ("sad", "happy")
    assert np.array_equal(dataset.labels, [[0, 1], [1, 1], [0, 0]]), "row order is kept"
    assert np.isnan(dataset.features[1, 0]), "empty cells are missing"
    assert np.isnan(dataset.features[2, 1]), "empty cells are missing"
    assert dataset.features[1, 1] == 2.25


@pytest.mark.parametrize(
    "content, line",
    [
        ("#labels=2\na,b,c,d\n1,2,0,2\n", 3),
        ("#labels=2\na,b,c,d\n1,2,0,1\n1,2,0\n", 4),
        ("#labels=2\na,b,c,d\n1,x,0,1\n", 3),
        ("#labels=2\na,b,c,d\n1,2,0,1,1\n", 3),
    ],
)
def test_load_mlc_csv_malformed(tmp_path, content, line):
    file = _write(tmp_path / "bad.csv", content)
    with pytest.raises(DatasetParseError, match=f"line {line}"):
        load_dataset(file, "mlc-csv")


def test_load_empty_files(tmp_path):
    with pytest.raises(EmptyDatasetError):
        load_dataset(_write(tmp_path / "empty.csv", ""), "mlc-csv")
    with pytest.raises(EmptyDatasetError):
        load_dataset(_write(tmp_path / "header.csv", "#labels=1\na,b\n"), "mlc-csv")
    with pytest.raises(EmptyDatasetError):
        load_dataset(_write(tmp_path / "empty.svm", "\n"), "svmlight-ml")


def test_load_svmlight_ml(tmp_path):
    file = _write(tmp_path / "toy.svm", "1,3 0:0.5 4:1.2\n- 2:3\n0\n")
    dataset = load_dataset(file, "svmlight-ml", n_labels=4)

    assert np.array_equal(
        dataset.labels, [[0, 1, 0, 1], [0, 0, 0, 0], [1, 0, 0, 0]]
    ), "label indices are 0-based positives, `-` means no positive label"
    assert dataset.n_features == 5, "width is given by the largest feature index"
    assert np.array_equal(
        dataset.features[0], [0.5, 0, 0, 0, 1.2]
    ), "absent indices are 0, not missing"
    assert not np.isnan(dataset.features).any()
    assert np.array_equal(dataset.features[2], np.zeros(5))


def test_load_svmlight_ml_malformed(tmp_path):
    with pytest.raises(DatasetParseError, match="line 2"):
        load_dataset(_write(tmp_path / "a.svm", "0 0:1\n0 3:1 1:2\n"), "svmlight-ml")
    with pytest.raises(DatasetParseError, match="line 1"):
        load_dataset(_write(tmp_path / "b.svm", "5 0:1\n"), "svmlight-ml", n_labels=3)
    with pytest.raises(DatasetParseError, match="line 1"):
        load_dataset(_write(tmp_path / "c.svm", "0 0:abc\n"), "svmlight-ml")


def test_load_svmlight_ml_with_training_width(tmp_path):
    file = _write(tmp_path / "narrow.svm", "0 0:1\n1 1:2\n")
    assert load_dataset(file, "svmlight-ml").n_features == 2, "without a width the largest index decides"

    dataset = load_dataset(file, "svmlight-ml", n_labels=2, n_features=5)
    assert dataset.features.shape == (2, 5), "absent trailing features are zero columns"
    assert np.array_equal(dataset.features[1], [0, 2, 0, 0, 0])

    with pytest.raises(DatasetParseError, match="line 2"):
        load_dataset(file, "svmlight-ml", n_features=1)


def test_load_mlc_csv_skips_blank_lines(tmp_path):
    file = _write(tmp_path / "blank.csv", "#labels=1\na,b\n1,0\n\n2,1\n")
    dataset = load_dataset(file, "mlc-csv")
    assert np.array_equal(dataset.labels[:, 0], [0, 1])

    bad = _write(tmp_path / "after_blank.csv", "#labels=1\na,b\n1,0\n\n2,x\n")
    with pytest.raises(DatasetParseError, match="line 5"):
        load_dataset(bad, "mlc-csv")


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        load_dataset(_write(tmp_path / "a.arff", "@relation x\n"), "arff")


def test_save_load_round_trip(tmp_path):
    dataset = make_dependent_labels(n_rows=50)
    assert np.isnan(dataset.features).any(), "toy data should contain missing values"

    save_dataset(dataset, str(tmp_path / "round_trip.csv"))
    reloaded = load_dataset(str(tmp_path / "round_trip.csv"), "mlc-csv")
    assert reloaded.equals(dataset), "round trip should yield an identical dataset"


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), np.array([[0], [2]]))
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        Dataset(np.zeros((0, 1)), np.zeros((0, 1)))
    with pytest.raises(ValueError):
        Dataset(np.array([[np.inf]]), np.array([[1]]))


def test_dataset_statistics():
    dataset = Dataset(np.zeros((4, 1)), np.array([[1, 0], [1, 1], [1, 0], [0, 0]]))
    assert dataset.label_cardinality == 1.0
    assert dataset.n_distinct_labelsets == 3


def test_split_holdout():
    dataset = make_dependent_labels(n_rows=10)
    train, holdout = split_holdout(dataset, 0.2, seed=7)
    assert train.n_instances == 8 and holdout.n_instances == 2, "sizes are ceil(0.8 M) and the rest"

    rows = {tuple(np.nan_to_num(row, nan=-9)) for row in dataset.features}
    train_rows = {tuple(np.nan_to_num(row, nan=-9)) for row in train.features}
    holdout_rows = {tuple(np.nan_to_num(row, nan=-9)) for row in holdout.features}
    assert train_rows | holdout_rows == rows, "split must cover all rows"
    assert not train_rows & holdout_rows, "split must be disjoint"

    again, _ = split_holdout(dataset, 0.2, seed=7)
    assert again.equals(train), "equal seeds must give equal partitions"


def test_split_holdout_seeds_differ():
    dataset = make_dependent_labels(n_rows=1000)
    first, _ = split_holdout(dataset, 0.2, seed=1)
    second, _ = split_holdout(dataset, 0.2, seed=2)
    assert not first.equals(second), "different seeds should give different partitions"


@pytest.mark.parametrize("fraction", [0, 1, -0.5, 1.5])
def test_split_holdout_bad_fraction(fraction):
    with pytest.raises(ValueError):
        split_holdout(make_dependent_labels(n_rows=10), fraction, seed=0)


def test_augment():
    dataset = Dataset(np.arange(4.0).reshape(2, 2), np.array([[0, 1, 1], [1, 0, 0]]))
    augmented = augment(dataset)

    assert augmented.label_features.shape == (2, 3)
    assert np.isnan(augmented.label_features).all(), "label features start missing"
    assert augmented.n_columns == 5
    assert np.isnan(augmented.features[:, 2:]).all(), "label features are the trailing columns"
    assert np.array_equal(augmented.features[:, :2], dataset.features)
    assert augmented.base is dataset, "augmentation does not copy or change the base"
    assert np.array_equal(
        augment(dataset).features, augmented.features, equal_nan=True
    ), "augmentation is pure"


def test_augmented_dataset_validation():
    dataset = Dataset(np.zeros((2, 1)), np.array([[0], [1]]))
    with pytest.raises(ValueError):
        AugmentedDataset(dataset, np.array([[0.5], [1.5]]))
    with pytest.raises(ValueError):
        AugmentedDataset(dataset, np.array([[0.5, 0.5], [0.5, 0.5]]))

    augmented = augment(dataset).with_label_features(np.array([[0.7], [np.nan]]))
    assert augmented.features[0, 1] == 0.7
    assert np.isnan(dataset.features).sum() == 0, "base is unchanged"


def test_dataset_is_immutable():
    dataset = make_dependent_labels(n_rows=5)
    with pytest.raises(ValueError):
        dataset.features[0, 0] = 1.0
    with pytest.raises(ValueError):
        dataset.labels[0, 0] = 1
