import numpy as np
import pandas as pd
import pytest

from dynchain import (
    BoostConfig,
    GainStrategy,
    GridSpec,
    MetricsReport,
    evaluate_model,
    fit_model,
    grid_search,
    rank_table,
    train_time_ratios,
)
from tests.toy_data import make_dependent_labels, make_threshold_labels


def test_fit_model_methods():
    data = make_dependent_labels(n_rows=50)
    config = BoostConfig(n_rounds=2, gain_strategy="maxGain")
    for method in ("br", "cc", "mlxgb", "xdcc", "xdcc-cum"):
        model = fit_model(method, data, config)
        assert model.method == method
        assert model.train_seconds > 0
        assert model.predict(data).shape == data.labels.shape

    assert fit_model("br", data, config).models[0].config.gain_strategy is GainStrategy.SUM_GAIN, (
        "single-label baselines always use sumGain"
    )
    assert fit_model("mlxgb", data, config).booster.config.gain_strategy is GainStrategy.MAX_GAIN
    assert fit_model("xdcc", data, config, chain_length=2).chain_length == 2

    with pytest.raises(ValueError):
        fit_model("rdt", data, config)
    with pytest.raises(ValueError):
        fit_model("br", data, config, chain_length=2)


def test_evaluate_model():
    data = make_threshold_labels(n_rows=100)
    model = fit_model("mlxgb", data, BoostConfig(n_rounds=20, max_depth=4))
    report = evaluate_model(model, data)

    assert 0 <= report.SA <= report.HA <= 1
    assert 0 <= report.F1 <= 1
    assert report.train_time == model.train_seconds
    assert report.predict_time >= 0
    assert set(report.to_dict(timing=False)) == {"HA", "SA", "F1"}


def test_train_time_ratios():
    reports = {
        "xdcc": MetricsReport(0.9, 0.5, 0.7, train_time=6.0),
        "mlxgb": MetricsReport(0.9, 0.5, 0.7, train_time=2.0),
    }
    ratios = train_time_ratios(reports, "mlxgb")
    assert ratios["xdcc"] == 3.0 and ratios["mlxgb"] == 1.0
    with pytest.raises(ValueError):
        train_time_ratios({"br": MetricsReport(1, 1, 1)}, "br")


def test_reference_grid_size():
    spec = GridSpec.reference_grid()
    assert len(list(spec.cells("xdcc"))) == 360
    assert len(list(spec.cells("br"))) == 60, "baselines do not vary the gain strategy"


def test_grid_from_file(tmp_path):
    path = tmp_path / "grid.txt"
    path.write_text(
        "# small grid\n"
        "trees=2,3\n"
        "depth = 2\n"
        "\n"
        "gain=sumGain,maxGrad\n"
        "chain-length=1,2\n",
        encoding="utf-8",
    )
    spec = GridSpec.from_file(str(path))
    assert spec.n_rounds == [2, 3]
    assert spec.max_depth == [2]
    assert spec.gain_strategy == [GainStrategy.SUM_GAIN, GainStrategy.MAX_WEIGHT]
    assert spec.learning_rate == [BoostConfig.learning_rate], "missing keys keep their default"
    assert len(list(spec.cells("xdcc"))) == 8
    assert len(list(spec.cells("mlxgb"))) == 4
    assert len(list(spec.cells("cc"))) == 2


@pytest.mark.parametrize("content", ["trees 2,3\n", "leaves=2\n", "trees=two\n", "trees=\n"])
def test_grid_file_errors(tmp_path, content):
    path = tmp_path / "grid.txt"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ValueError):
        GridSpec.from_file(str(path))


def test_grid_search_singleton():
    data = make_dependent_labels(n_rows=60)
    spec = GridSpec(n_rounds=[3], max_depth=[2])
    best, table = grid_search(data, spec, "mlxgb", seed=0)

    assert best.config == BoostConfig(n_rounds=3, max_depth=2)
    assert best.chain_length is None
    assert len(table) == 1


def test_grid_search_picks_best_cell():
    data = make_threshold_labels(n_rows=150)
    spec = GridSpec(n_rounds=[1, 30], max_depth=[0, 4], learning_rate=[0.3])
    best, table = grid_search(data, spec, "mlxgb", seed=3)

    assert len(table) == 4, "one row per cell"
    assert table["F1"].max() == table.loc[table["F1"].idxmax(), "F1"]
    row = table.loc[int(np.argmax(table["F1"].to_numpy()))]
    assert (best.config.n_rounds, best.config.max_depth) == (row["trees"], row["depth"])
    assert best.config.max_depth == 4, "single leaves cannot compete with real trees"

    _, again = grid_search(data, spec, "mlxgb", seed=3, timing=False)
    assert "train_time" not in again.columns
    pd.testing.assert_frame_equal(again, table.drop(columns="train_time"))


def test_rank_table():
    ranks = rank_table({"d1": {"a": 0.9, "b": 0.8, "c": 0.7}})
    assert ranks["d1"].to_dict() == {"a": 1.0, "b": 2.0, "c": 3.0}

    ties = rank_table({"d1": {"a": 0.5, "b": 0.5, "c": 0.1}})
    assert ties.loc["a", "d1"] == 1.5 and ties.loc["b", "d1"] == 1.5

    opposite = rank_table({"d1": {"a": 1.0, "b": 0.0}, "d2": {"a": 0.0, "b": 1.0}})
    assert (opposite["average_rank"] == 1.5).all()

    lower = rank_table({"d1": {"a": 3.0, "b": 1.0}}, higher_is_better=False)
    assert lower.index[0] == "b", "sorted by average rank"


def test_rank_table_long_format():
    long = pd.DataFrame(
        {
            "dataset": ["d1", "d1", "d2", "d2"],
            "method": ["xdcc", "br", "xdcc", "br"],
            "value": [0.6, 0.5, 0.7, 0.4],
        }
    )
    ranks = rank_table(long)
    assert ranks.index.tolist() == ["xdcc", "br"]
    assert ranks["rank_of_average"].tolist() == [1.0, 2.0]


def test_rank_table_missing_cell():
    with pytest.raises(ValueError):
        rank_table({"d1": {"a": 0.9, "b": 0.8}, "d2": {"a": 0.9}})
