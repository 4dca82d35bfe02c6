import io
import json
import time

import pytest

from stability.exceptions import DimensionError, StreamHeaderError
from stability.monitor import Monitor, StreamHeader, read_header
from stability.synthgen import generate_clip, stream_header, write_stream

MAX_WINDOW_LATENCY = 0.1


def run_monitor(model, data, queue_windows=4):
    output = io.StringIO()
    monitor = Monitor(
        model, io.BytesIO(data), output, queue_windows=queue_windows)
    summary = monitor.run()
    records = [json.loads(line) for line in output.getvalue().splitlines()]
    return summary, records


def stream_of(*clips):
    stream = io.BytesIO()
    write_stream(clips, stream)
    return stream.getvalue()


@pytest.fixture
def stable_clip(stable_scenario):
    return generate_clip(stable_scenario)


def test_stable_stream(trained_model, stable_clip):
    summary, records = run_monitor(
        trained_model, stream_of(stable_clip, stable_clip))
    assert [record["label"] for record in records] == ["stable", "stable"]
    assert (summary.windows, summary.frames) == (2, 60)
    assert not summary.truncated, "Целый поток не даёт итоговой записи."


def test_detachment_window_raises_alert(trained_model, stable_clip,
                                        detachment_clip):
    summary, records = run_monitor(
        trained_model,
        stream_of(stable_clip, detachment_clip, stable_clip),
        queue_windows=1,
    )
    assert [record["label"] for record in records] == [
        "stable", "unstable", "stable"]
    alert = records[1]
    assert (alert["window"], alert["first_frame"], alert["last_frame"]) == (
        1, 30, 59)
    assert alert["d_unstable"] <= alert["d_other"]
    assert set(alert) == {
        "window", "first_frame", "last_frame", "label", "d_unstable",
        "d_other", "ts",
    }


def test_truncated_stream_reports_summary(trained_model, stable_clip,
                                          caplog):
    data = stream_of(stable_clip, stable_clip)
    cut = len(stream_header(64, 64, 30)) + 45 * 64 * 64 + 100
    summary, records = run_monitor(trained_model, data[:cut])
    assert (summary.windows, summary.frames) == (1, 45)
    assert summary.discarded_frames == 15
    assert summary.truncated_bytes == 100
    assert records[-1] == {
        "summary": True, "windows": 1, "frames": 45, "discarded_frames": 15,
    }
    assert "поток оборван" in caplog.text


def test_empty_stream(trained_model):
    with pytest.raises(StreamHeaderError):
        run_monitor(trained_model, b"")


def test_header_only_stream(trained_model):
    summary, records = run_monitor(trained_model, stream_header(64, 64, 30))
    assert records == []
    assert summary.windows == summary.frames == 0


def test_box_outside_stream_frame(trained_model):
    with pytest.raises(DimensionError):
        run_monitor(trained_model, stream_header(16, 16, 30) + bytes(256))


def test_read_header():
    header = read_header(io.BytesIO(b"FSPV1 640 480 29.97\nrest"))
    assert header == StreamHeader(640, 480, 29.97)


@pytest.mark.parametrize(
    "data",
    [
        b"FSPV1 64 64 30",
        b"FSPV2 64 64 30\n",
        b"FSPV1 64 64\n",
        b"FSPV1 0 64 30\n",
        b"FSPV1 64 64 -1\n",
        b"FSPV1 sixty 64 30\n",
        b"FSPV1 " + b"9" * 80 + b"\n",
    ],
)
def test_bad_header(data):
    with pytest.raises(StreamHeaderError):
        read_header(io.BytesIO(data))


@pytest.mark.slow
def test_window_latency(trained_model, stable_clip, detachment_clip):
    clips = [stable_clip, detachment_clip] * 5
    data = stream_of(*clips)
    started = time.perf_counter()
    summary, records = run_monitor(trained_model, data)
    elapsed = time.perf_counter() - started
    assert len(records) == summary.windows == 10
    assert elapsed / summary.windows < MAX_WINDOW_LATENCY, (
        "Окно должно классифицироваться быстрее 100 мс."
    )
