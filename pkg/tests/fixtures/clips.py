import numpy as np
import pytest

from conftest import FEATURE_BOX, FRAME_HEIGHT, FRAME_WIDTH, SMALL_BOX
from stability.flsc import FlscConfig
from stability.imaging import Clip, write_clip
from stability.pipeline import save_model, train_unsupervised
from stability.synthgen import (
    Event, Scenario, generate_clip, synthetic_corpus,
)


@pytest.fixture
def constant_clip():
    return Clip(np.full((30, 10, 12), 100, dtype=np.uint8))


@pytest.fixture
def small_config():
    return FlscConfig(box=SMALL_BOX)


@pytest.fixture
def feature_config():
    return FlscConfig(box=FEATURE_BOX)


@pytest.fixture
def stable_scenario():
    return Scenario(
        width=FRAME_WIDTH,
        height=FRAME_HEIGHT,
        duration=30,
        flame_region=FEATURE_BOX,
        base_luminance=150,
        background_luminance=5,
    )


@pytest.fixture
def extinction_scenario(stable_scenario):
    return Scenario(
        width=stable_scenario.width,
        height=stable_scenario.height,
        duration=30,
        flame_region=FEATURE_BOX,
        base_luminance=150,
        background_luminance=5,
        events=(Event(10, 12, "extinction", 1.0),),
    )


@pytest.fixture
def extinction_clip(extinction_scenario):
    return generate_clip(extinction_scenario)


@pytest.fixture
def detachment_clip(stable_scenario):
    """Пламя горит в первом кадре и отрывается до конца окна."""
    return generate_clip(Scenario(
        width=stable_scenario.width,
        height=stable_scenario.height,
        duration=30,
        flame_region=FEATURE_BOX,
        base_luminance=150,
        background_luminance=5,
        events=(Event(1, 29, "extinction", 1.0),),
    ))


@pytest.fixture
def stable_clip_dir(tmp_path, stable_scenario):
    path = tmp_path / "stable_clip"
    write_clip(generate_clip(stable_scenario), path)
    return path


@pytest.fixture
def extinction_clip_dir(tmp_path, extinction_clip):
    path = tmp_path / "extinction_clip"
    write_clip(extinction_clip, path)
    return path


@pytest.fixture
def detachment_clip_dir(tmp_path, detachment_clip):
    path = tmp_path / "detachment_clip"
    write_clip(detachment_clip, path)
    return path


@pytest.fixture(scope="session")
def trained_model():
    entries = synthetic_corpus(6, 4, seed=5, box=FEATURE_BOX)
    return train_unsupervised(
        ((entry.clip_id, entry.clip()) for entry in entries),
        FlscConfig(box=FEATURE_BOX), seed=0,
    )


@pytest.fixture
def model_file(tmp_path, trained_model):
    path = tmp_path / "model.fspm"
    save_model(trained_model, path)
    return path
