import numpy as np
import pytest

from dynchain import (
    BoostConfig,
    Dataset,
    WidthMismatchError,
    per_label_accuracy,
    predict_cc,
    train_br,
    train_cc,
    train_mlxgb,
)
from tests.toy_data import make_and_copy_labels, make_dependent_labels, make_separable


def _copy_seed() -> int:
    """A seed whose two-label chain order is (0, 1)"""
    for seed in range(100):
        if list(np.random.default_rng(seed).permutation(2)) == [0, 1]:
            return seed
    raise AssertionError("no seed found")


def test_single_label_methods_agree():
    data = make_separable()
    config = BoostConfig(n_rounds=5, max_depth=2)
    mlxgb = train_mlxgb(data, config)
    br = train_br(data, config)
    cc = train_cc(data, config, seed=3)

    assert np.array_equal(mlxgb.predict_proba(data), br.predict_proba(data)), "one label, one code path"
    assert np.array_equal(mlxgb.predict(data), cc.predict(data))


def test_br_fits_separable_set():
    data = make_separable()
    br = train_br(data, BoostConfig(n_rounds=50, max_depth=2))
    assert (per_label_accuracy(data.labels, br.predict(data)) == 1.0).all()


def test_br_labels_are_independent():
    data = make_dependent_labels(n_rows=60)
    config = BoostConfig(n_rounds=3)
    permuted = Dataset(data.features, data.labels[:, [0, 5, 4, 3, 2, 1]])
    first, second = train_br(data, config), train_br(permuted, config)
    assert np.array_equal(
        first.predict(data)[:, 0], second.predict(data)[:, 0]
    ), "label 0 should not depend on the other labels"
    assert len(first.models) == data.n_labels
    assert all(model.n_labels == 1 for model in first.models)


def test_cc_is_deterministic():
    data = make_dependent_labels(n_rows=60)
    config = BoostConfig(n_rounds=3)
    first, second = train_cc(data, config, seed=5), train_cc(data, config, seed=5)
    assert first.order == second.order
    assert sorted(first.order) == list(range(data.n_labels)), "order is a permutation"
    assert np.array_equal(first.predict(data), second.predict(data))
    assert np.array_equal(predict_cc(first, data), predict_cc(first, data))


def test_cc_chain_widths():
    data = make_dependent_labels(n_rows=60)
    cc = train_cc(data, BoostConfig(n_rounds=2), seed=0)
    for position, model in enumerate(cc.models):
        assert model.n_features == data.n_features + position, "each model sees its predecessors"


def test_cc_copies_predecessor():
    data = make_and_copy_labels()
    cc = train_cc(data, BoostConfig(n_rounds=5, max_depth=2, min_child_weight=0), seed=_copy_seed())
    assert cc.order == [0, 1]

    chain_column = data.n_features
    for tree in cc.models[1].trees:
        assert set(tree.split_features()) <= {chain_column}, "the copy is learned from the chain column only"
    assert (per_label_accuracy(data.labels, cc.predict(data)) == 1.0).all()


def test_models_share_output_shape():
    data = make_dependent_labels(n_rows=40)
    config = BoostConfig(n_rounds=2)
    for model in (train_mlxgb(data, config), train_br(data, config), train_cc(data, config)):
        assert model.predict(data).shape == data.labels.shape
        with pytest.raises(WidthMismatchError):
            model.predict(np.zeros((2, data.n_features + 1)))
