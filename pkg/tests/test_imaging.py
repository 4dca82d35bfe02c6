import io
import json

import numpy as np
import pytest
from PIL import Image

from stability.exceptions import (
    ClipNotFoundError, DimensionError, EmptyInputError, FrameFormatError,
)
from stability.imaging import (
    BoundingBox, Clip, Frame, crop_bbox, crop_clip, decode_pgm, encode_pgm,
    frame_mean_luminance, read_clip, read_corpus, rgb_to_luminance,
    write_clip,
)


def gradient_frame(width=12, height=10):
    values = (np.arange(width * height) * 7) % 256
    return Frame.from_values(width, height, values)


def test_encode_pgm_is_readable_by_pillow():
    frame = gradient_frame()
    image = Image.open(io.BytesIO(encode_pgm(frame)))
    assert image.mode == "L", "Кадр PGM должен читаться как изображение L."
    assert image.size == (frame.width, frame.height)
    assert np.array_equal(np.array(image), frame.pixels), (
        "Pillow должен прочитать те же пиксели, что записаны в PGM."
    )


def test_decode_pgm_reads_pillow_output():
    pixels = gradient_frame(7, 5).pixels
    buffer = io.BytesIO()
    Image.fromarray(pixels).save(buffer, format="PPM")
    frame = decode_pgm(buffer.getvalue())
    assert np.array_equal(frame.pixels, pixels), (
        "Кадр, записанный Pillow, должен читаться без искажений."
    )


def test_decode_pgm_skips_header_comments():
    data = b"P5\n# camera 1\n3 2\n# maxval next\n255\n" + bytes(range(6))
    frame = decode_pgm(data)
    assert (frame.width, frame.height) == (3, 2)
    assert frame.pixels.tolist() == [[0, 1, 2], [3, 4, 5]]


def test_decode_pgm_first_row_is_top_row():
    frame = decode_pgm(b"P5 2 2 255\n" + bytes([10, 20, 30, 40]))
    assert frame.pixels[0].tolist() == [10, 20], (
        "Первая строка растра PGM соответствует верхней строке кадра."
    )


@pytest.mark.parametrize(
    "data, fragment",
    [
        (b"P6\n2 2\n255\n" + bytes(12), "P5"),
        (b"P5\n2 2\n65535\n" + bytes(8), "unsupported maxval"),
        (b"P5\n2 2\n255\n" + bytes(3), "оборван"),
        (b"P5\n2 2\n255\n" + bytes(5), "лишние"),
        (b"P5\n2 x\n255\n" + bytes(4), "неожиданный байт"),
        (b"P5\n0 2\n255\n", "ширина"),
    ],
)
def test_decode_pgm_rejects_malformed(data, fragment):
    with pytest.raises(FrameFormatError) as error:
        decode_pgm(data)
    assert fragment in str(error.value)
    assert error.value.offset is not None, (
        "Ошибка формата PGM должна сообщать смещение в байтах."
    )


def test_decode_pgm_reports_trailing_bytes():
    data = b"P5\n2 2\n255\n" + bytes(5)
    with pytest.raises(FrameFormatError) as error:
        decode_pgm(data)
    assert error.value.offset == len(data) - 1


def test_truncated_raster_offset_is_end_of_data():
    data = b"P5\n4 4\n255\n" + bytes(10)
    with pytest.raises(FrameFormatError) as error:
        decode_pgm(data)
    assert error.value.offset == len(data)


@pytest.mark.parametrize(
    "rgb, expected",
    [
        ((0, 0, 0), 0),
        ((255, 255, 255), 255),
        ((1, 0, 0), 0),
        ((1, 1, 0), 1),
        ((10, 20, 30), 20),
        ((100, 101, 101), 101),
    ],
)
def test_rgb_to_luminance(rgb, expected):
    assert rgb_to_luminance(*rgb) == expected


def test_rgb_to_luminance_rejects_out_of_range():
    with pytest.raises(ValueError):
        rgb_to_luminance(256, 0, 0)


def test_bounding_box_offset_is_from_bottom():
    box = BoundingBox(450, 270, 30, 50)
    assert box.top_origin(480) == (450, 210), (
        "Отступ рамки отсчитывается от нижней границы кадра."
    )
    assert box.area == 1500


def test_bounding_box_parse():
    assert BoundingBox.parse("450,270,30,50") == BoundingBox(450, 270, 30, 50)
    with pytest.raises(ValueError):
        BoundingBox.parse("1,2,3")


def test_crop_bbox_takes_expected_pixels():
    frame = gradient_frame()
    box = BoundingBox(2, 8, 4, 3)
    region = crop_bbox(frame, box)
    assert np.array_equal(region.pixels, frame.pixels[2:5, 2:6])


def test_crop_bbox_outside_frame_names_both_rectangles():
    frame = gradient_frame()
    with pytest.raises(DimensionError) as error:
        crop_bbox(frame, BoundingBox(10, 8, 4, 3))
    message = str(error.value)
    assert "w=4" in message and "w=12" in message, (
        "Сообщение должно описывать и рамку, и кадр."
    )


def test_crop_clip_of_empty_clip():
    clip = Clip.from_frames([])
    assert crop_clip(clip, BoundingBox(0, 2, 2, 2)).shape == (0, 2, 2)


def test_frame_mean_luminance():
    frame = Frame(np.array([[0, 255], [255, 0]]))
    assert frame_mean_luminance(frame) == 127.5
    with pytest.raises(EmptyInputError):
        frame_mean_luminance(Frame(np.zeros((0, 0))))


def test_frame_rejects_values_outside_range():
    with pytest.raises(DimensionError):
        Frame(np.array([[0, 256]]))


def test_clip_rejects_mixed_frame_sizes():
    with pytest.raises(DimensionError):
        Clip.from_frames([gradient_frame(4, 4), gradient_frame(5, 4)])


def test_write_and_read_clip_directory(tmp_path):
    clip = Clip.from_frames(
        [gradient_frame(), Frame(np.full((10, 12), 9))], fps=25.0)
    write_clip(clip, tmp_path / "clip")
    assert (tmp_path / "clip" / "frame_000001.pgm").is_file()
    meta = json.loads((tmp_path / "clip" / "clip.json").read_text())
    assert meta == {"fps": 25.0, "frame_count": 2}
    assert read_clip(tmp_path / "clip") == clip


def test_read_clip_without_metadata(tmp_path):
    with pytest.raises(ClipNotFoundError):
        read_clip(tmp_path)


def test_read_clip_with_missing_frame(tmp_path):
    clip = Clip.from_frames([gradient_frame(), gradient_frame()])
    write_clip(clip, tmp_path)
    (tmp_path / "frame_000002.pgm").unlink()
    with pytest.raises(FrameFormatError):
        read_clip(tmp_path)


def test_read_corpus_yields_sorted_clip_directories(tmp_path):
    clip = Clip.from_frames([gradient_frame()])
    for name in ("b", "a"):
        write_clip(clip, tmp_path / name)
    (tmp_path / "notes").mkdir()
    (tmp_path / "raters.csv").write_text("video_id,rater_id,score\n")
    names = [name for name, _ in read_corpus(tmp_path)]
    assert names == ["a", "b"], (
        "Корпус состоит из подкаталогов с clip.json в алфавитном порядке."
    )
