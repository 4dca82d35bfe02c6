import io
import json
from dataclasses import replace

import numpy as np
import pytest
from django.core.exceptions import ValidationError

from conftest import FEATURE_BOX
from stability.exceptions import DimensionError
from stability.imaging import BoundingBox, Clip
from stability.labels import StabilityLabel
from stability.synthgen import (
    Event, Scenario, calibrated_noise_sigma, expected_label, frame_levels,
    generate_clip, synthetic_corpus, write_stream,
)


def test_default_scenario_is_valid():
    scenario = Scenario()
    scenario.validate()
    assert scenario.flame_region.as_tuple() == (450, 270, 30, 50)


def test_all_violations_are_reported(stable_scenario):
    scenario = replace(
        stable_scenario,
        base_luminance=3,
        events=(Event(25, 40), Event(1, 2, "flicker", 1.5)),
    )
    with pytest.raises(ValidationError) as error:
        scenario.validate()
    assert len(error.value.messages) == 4


def test_region_outside_frame(stable_scenario):
    scenario = replace(
        stable_scenario, flame_region=BoundingBox(50, 60, 30, 50))
    assert scenario.violations()
    with pytest.raises(ValidationError):
        generate_clip(scenario)


def test_extinction_clip_levels(extinction_scenario, extinction_clip,
                                feature_config):
    assert frame_levels(extinction_scenario)[9:14].tolist() == [
        150, 5, 5, 5, 150]
    x0, y0 = FEATURE_BOX.check_fits(64, 64)
    assert extinction_clip.array[11, y0, x0] == 5
    assert extinction_clip.array[0, y0, x0] == 150
    assert extinction_clip.array[0, 0, 0] == 5
    assert expected_label(extinction_scenario, feature_config) == (
        StabilityLabel.UNSTABLE)


def test_overlapping_events_take_deepest_drop(stable_scenario):
    scenario = replace(
        stable_scenario,
        events=(Event(2, 6, "dimming", 0.2), Event(4, 4, "extinction")),
    )
    levels = frame_levels(scenario).tolist()
    assert levels[2:7] == [121, 121, 5, 121, 121]
    assert scenario.events[0].covers(6)
    assert not scenario.events[0].covers(7)


def test_dimming_is_uncertain(stable_scenario, feature_config):
    scenario = replace(
        stable_scenario, events=(Event(5, 5, "dimming", 0.19),))
    assert expected_label(scenario, feature_config) == (
        StabilityLabel.UNCERTAIN)
    assert expected_label(stable_scenario, feature_config) == (
        StabilityLabel.STABLE)


def test_noise_is_seeded(stable_scenario):
    noisy = replace(stable_scenario, noise_sigma=5.0, seed=11)
    first = generate_clip(noisy)
    assert first == generate_clip(noisy)
    assert first != generate_clip(replace(noisy, seed=12))
    assert first.array.dtype == np.uint8


def test_heavy_noise_makes_label_indeterminate(stable_scenario,
                                               feature_config):
    scenario = replace(
        stable_scenario,
        events=(Event(5, 5, "dimming", 0.2),),
        noise_sigma=40.0,
    )
    assert expected_label(scenario, feature_config) is None


def test_calibrated_noise_sigma():
    assert calibrated_noise_sigma(FEATURE_BOX) == pytest.approx(
        0.4 * 1500 ** 0.5 / 3)


def test_json_round_trip(extinction_scenario):
    text = extinction_scenario.to_json()
    assert json.loads(text)["flame_region"] == [17, 50, 30, 50]
    assert Scenario.from_json(text) == extinction_scenario


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        "[1, 2]",
        '{"duration": 30, "colour": "red"}',
        '{"flame_region": [0, 0, 0, 0]}',
        '{"events": [{"start_frame": 1}]}',
        '{"duration": 10, "events": [{"start_frame": 5, "end_frame": 12}]}',
    ],
)
def test_bad_scenario_json(text):
    with pytest.raises(ValidationError):
        Scenario.from_json(text)


def test_synthetic_corpus_is_deterministic():
    first = synthetic_corpus(5, 3, seed=4, box=FEATURE_BOX)
    second = synthetic_corpus(5, 3, seed=4, box=FEATURE_BOX)
    assert [entry.scenario for entry in first] == [
        entry.scenario for entry in second]
    assert [entry.clip_id for entry in first] == [
        f"clip_{number:03d}" for number in range(8)]


def test_synthetic_corpus_events():
    entries = synthetic_corpus(10, 10, seed=9, box=FEATURE_BOX)
    truths = [entry.truth for entry in entries]
    assert truths.count(StabilityLabel.STABLE) == 10
    bases = {entry.scenario.base_luminance for entry in entries}
    assert all(100 <= base <= 200 for base in bases)
    assert len(bases) > 1, "Яркость пламени должна меняться от клипа к клипу."
    for entry in entries:
        events = entry.scenario.events
        if entry.truth == StabilityLabel.STABLE:
            assert events == ()
            continue
        assert 1 <= len(events) <= 3
        windows = [event.start_frame // 30 for event in events]
        assert len(set(windows)) == len(windows), (
            "Отрывы пламени нестабильного клипа лежат в разных окнах."
        )
        for event, window in zip(events, windows):
            assert event.start_frame - 30 * window in (1, 2)
            assert event.end_frame == 30 * window + 29
            assert event.type == "extinction"


def test_corpus_brightness_range_is_checked():
    with pytest.raises(ValidationError):
        synthetic_corpus(1, 1, seed=0, box=FEATURE_BOX, base_range=(3, 90))


def test_write_stream(extinction_clip):
    stream = io.BytesIO()
    written = write_stream([extinction_clip, extinction_clip], stream)
    assert written == 60
    data = stream.getvalue()
    header = b"FSPV1 64 64 30\n"
    assert data.startswith(header)
    assert len(data) == len(header) + 60 * 64 * 64


def test_write_stream_rejects_mixed_sizes(extinction_clip):
    other = Clip(np.zeros((2, 8, 8), dtype=np.uint8))
    with pytest.raises(DimensionError):
        write_stream([extinction_clip, other], io.BytesIO())
