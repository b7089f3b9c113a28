import numpy as np
import pytest
from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"

# small-but-real landmark subset: arms + torso corners + one hand point
TINY_SUBSET = (11, 12, 13, 14, 15, 16, 23, 24, 33)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def full_catalog():
    from signdict.catalog import load_catalog

    return load_catalog(FIXTURES / "catalog_full.tsv")


@pytest.fixture(scope="session")
def synth_catalog():
    from signdict.synth import synthetic_catalog

    return synthetic_catalog(10)


@pytest.fixture(scope="session")
def tiny_dataset():
    from signdict.synth import synthesize_dataset

    return synthesize_dataset(10, 8, frames=12, noise_sigma=0.02, seed=3)


@pytest.fixture(scope="session")
def tiny_model(tiny_dataset, synth_catalog):
    """A quickly trained real model for serialization/service/CLI tests."""
    from signdict.recognizer import ModelConfig, TrainConfig, train

    cfg = ModelConfig(
        landmark_subset=TINY_SUBSET, num_layers=2, num_heads=9, max_frames=64
    )
    return train(
        tiny_dataset.coords,
        tiny_dataset.labels,
        synth_catalog,
        cfg,
        TrainConfig(epochs=3, seed=3),
    )


@pytest.fixture(scope="session")
def tiny_model_files(tiny_model, synth_catalog, tmp_path_factory):
    """(model_path, catalog_path) for tests that load from disk."""
    from signdict.catalog import save_catalog
    from signdict.recognizer import save_model

    d = tmp_path_factory.mktemp("tiny_model")
    model_path = d / "model.bin"
    catalog_path = d / "catalog.tsv"
    save_model(tiny_model, model_path)
    save_catalog(synth_catalog, catalog_path)
    return model_path, catalog_path


@pytest.fixture
def make_service(tiny_model_files, tmp_path):
    """Factory for a live service on fresh storage; yields TestClient."""
    from fastapi.testclient import TestClient

    from signdict.service import ServiceConfig, create_app

    model_path, catalog_path = tiny_model_files
    made = []

    def factory(**overrides):
        storage = tmp_path / f"storage{len(made)}"
        cfg = ServiceConfig(
            storage_dir=str(storage),
            model_path=str(model_path),
            catalog_path=str(catalog_path),
            **overrides,
        )
        app = create_app(cfg)
        client = TestClient(app)
        client.__enter__()
        made.append((client, storage))
        return client, storage

    yield factory
    for client, _ in made:
        client.__exit__(None, None, None)


def wait_for_state(client, sid: str, states=("done", "rejected", "failed"), timeout=30.0):
    """Poll a submission until it reaches a terminal state."""
    import time

    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = client.get(f"/api/v1/submissions/{sid}/status").json()
        if doc["state"] in states:
            return doc
        time.sleep(0.02)
    raise AssertionError(f"submission {sid} never reached {states}")


def pytest_terminal_summary(terminalreporter):
    import _criteria

    if _criteria.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _criteria.LINES:
            terminalreporter.write_line(line)
