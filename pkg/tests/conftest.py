import pytest
from django.test import override_settings
from mixer.backend.django import mixer as _mixer

from stability.imaging import BoundingBox

N_PER_FIXTURE = 3
N_RATERS = 11
N_STABLE_VIDEOS = 38
N_UNSTABLE_VIDEOS = 15

FRAME_WIDTH = 64
FRAME_HEIGHT = 64
# рамка 30×50: окно из 30 кадров даёт 45 000 признаков
FEATURE_BOX = BoundingBox(17, 50, 30, 50)
SMALL_BOX = BoundingBox(2, 8, 4, 4)


@pytest.fixture(autouse=True)
def enable_debug_false():
    with override_settings(DEBUG=False):
        yield


pytest_plugins = [
    "fixtures.clips",
    "fixtures.ratings",
]


@pytest.fixture
def mixer():
    return _mixer
