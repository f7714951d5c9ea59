import json

import numpy as np
import pytest

from arffsde.arff import ArffConfig
from arffsde.data import SnapshotDataset
from arffsde.errors import InvalidArgumentError
from arffsde.io import (DataFileError, read_dataset, read_ensemble_csv, read_json, read_model,
                        sidecar_path, write_dataset, write_ensemble_csv, write_model)
from arffsde.learner import learn_sde
from arffsde.simulate import EnsembleSummary


def test_dataset_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    ds = SnapshotDataset(rng.normal(size=(20, 2)), rng.normal(size=(20, 2)), 0.01,
                         split_seed=4)
    p = tmp_path / "d.csv"
    write_dataset(p, ds, {"problem": "3b"})
    back = read_dataset(p)
    assert np.array_equal(back.x0, ds.x0) and np.array_equal(back.x1, ds.x1)
    assert np.array_equal(back.h, ds.h) and back.split_seed == 4
    assert back.meta["problem"] == "3b"
    side = json.loads(sidecar_path(p).read_text())
    assert side["n_rows"] == 20 and side["columns"][0] == "h"


def test_dataset_with_inputs_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    ds = SnapshotDataset(rng.normal(size=(5, 1)), rng.normal(size=(5, 1)), 0.01,
                         inputs=rng.normal(size=(5, 2)))
    p = tmp_path / "d.csv"
    write_dataset(p, ds)
    back = read_dataset(p)
    assert np.array_equal(back.inputs, ds.inputs)


def test_missing_dataset(tmp_path):
    with pytest.raises(DataFileError):
        read_dataset(tmp_path / "nope.csv")


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InvalidArgumentError):
        read_json(p)


def test_model_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    x0 = rng.uniform(-1, 1, size=(300, 1))
    x1 = x0 + 0.1 * 0.5 * x0 + 0.03 * rng.normal(size=x0.shape)
    sde, *_ = learn_sde(SnapshotDataset(x0, x1, 0.1), ArffConfig(max_iterations=5,
                                                                 feature_count=4),
                        ArffConfig(max_iterations=5, feature_count=4))
    p = tmp_path / "m.json"
    write_model(p, sde, {"note": 1})
    back, raw = read_model(p)
    assert raw["config"] == {"note": 1}
    assert np.array_equal(back.drift_fn(x0), sde.drift_fn(x0))
    assert np.array_equal(back.covariance(x0), sde.covariance(x0))


def test_ensemble_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    s = EnsembleSummary(np.array([0.5, 1.0]), [rng.normal(size=(7, 2)) for _ in range(2)])
    p = tmp_path / "e.csv"
    write_ensemble_csv(p, s)
    back = read_ensemble_csv(p)
    assert np.array_equal(back.times, s.times)
    for a, b in zip(back.samples, s.samples):
        assert np.array_equal(a, b)
