"""Shared fixtures: one small generated dataset and one quickly trained model."""

import numpy as np
import pytest

from spentfuel import dataset, mlp


@pytest.fixture(scope="session")
def small_ds() -> dataset.Dataset:
    # 260 rows: enough to split (200 test + 60 train/val) while staying fast.
    return dataset.generate(260, seed=5)


@pytest.fixture(scope="session")
def small_ds_path(small_ds, tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "small.csv"
    dataset.save(small_ds, path)
    return path


@pytest.fixture(scope="session")
def small_splits(small_ds) -> dataset.Splits:
    return dataset.split(small_ds, dataset.SplitSpec(seed=5))


@pytest.fixture(scope="session")
def quick_model(small_ds, small_splits) -> mlp.MlpModel:
    arch = mlp.MlpArchitecture(hidden_layers=1, hidden_dim=48)
    config = mlp.TrainConfig(learning_rate=2e-3, batch_size=16, max_epochs=150,
                             patience=25, seed=9)
    model, _report = mlp.train(small_ds, small_splits, arch, config)
    return model


@pytest.fixture(scope="session")
def quick_model_path(quick_model, tmp_path_factory):
    path = tmp_path_factory.mktemp("models") / "quick.json"
    mlp.save_model(quick_model, path)
    return path


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
