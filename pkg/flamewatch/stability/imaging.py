"""
Кадры, клипы и ограничивающие рамки.

Кадр хранит яркость пикселей (0..255) как массив numpy формы (высота,
ширина). Клип хранит кадры одним массивом (кадры, высота, ширина), что
позволяет вырезать рамку сразу из всех кадров.
"""
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import (
    ClipNotFoundError,
    DimensionError,
    EmptyInputError,
    FrameFormatError,
)

logger = logging.getLogger(__name__)

PGM_MAGIC = b'P5'
PGM_MAXVAL = 255
CLIP_META = 'clip.json'
FRAME_NAME = 'frame_{:06d}.pgm'
DEFAULT_FPS = 30.0

_WHITESPACE = b' \t\r\n\x0b\x0c'


def _readonly(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Frame:
    """
    Кадр в оттенках серого.

    :Поля:
    - pixels (ndarray uint8): яркость пикселей, строки сверху вниз.
    """
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise DimensionError(
                f'кадр должен быть двумерным, получено {pixels.shape}')
        if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
            raise DimensionError('яркость пикселя вне диапазона 0..255')
        pixels = np.array(pixels, dtype=np.uint8)
        object.__setattr__(self, 'pixels', _readonly(pixels))

    @classmethod
    def from_values(cls, width, height, values):
        """Кадр из плоской последовательности значений (построчно)."""
        values = np.asarray(values)
        if values.size != width * height:
            raise DimensionError(
                f'ожидалось {width * height} пикселей, получено {values.size}'
            )
        return cls(values.reshape(height, width))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Clip:
    """
    Упорядоченная последовательность кадров одного размера.

    :Поля:
    - array (ndarray uint8): кадры формы (кадры, высота, ширина).
    - fps (float): частота кадров.
    """
    array: np.ndarray
    fps: float = DEFAULT_FPS

    def __post_init__(self):
        array = np.asarray(self.array)
        if array.ndim != 3:
            raise DimensionError(
                f'клип должен быть трёхмерным, получено {array.shape}')
        if self.fps <= 0:
            raise DimensionError(f'fps должен быть положительным: {self.fps}')
        array = np.array(array, dtype=np.uint8)
        object.__setattr__(self, 'array', _readonly(array))
        object.__setattr__(self, 'fps', float(self.fps))

    @classmethod
    def from_frames(cls, frames, fps=DEFAULT_FPS):
        frames = list(frames)
        if not frames:
            return cls(np.zeros((0, 0, 0), dtype=np.uint8), fps)
        shapes = {frame.pixels.shape for frame in frames}
        if len(shapes) != 1:
            raise DimensionError(f'кадры разного размера: {sorted(shapes)}')
        return cls(np.stack([frame.pixels for frame in frames]), fps)

    @property
    def width(self):
        return self.array.shape[2]

    @property
    def height(self):
        return self.array.shape[1]

    def __len__(self):
        return self.array.shape[0]

    def __getitem__(self, index):
        return Frame(self.array[index])

    def __iter__(self):
        for pixels in self.array:
            yield Frame(pixels)

    def __eq__(self, other):
        if not isinstance(other, Clip):
            return NotImplemented
        return self.fps == other.fps and np.array_equal(
            self.array, other.array)

    __hash__ = None


@dataclass(frozen=True)
class BoundingBox:
    """
    Ограничивающая рамка вокруг точки привязки пламени.

    Вертикальная координата задаётся отступом от нижней границы кадра до
    верхнего левого угла рамки.

    :Поля:
    - left (int): отступ от левой границы, пикселей.
    - bottom_offset (int): отступ от нижней границы до верхнего левого угла.
    - width (int): ширина рамки.
    - height (int): высота рамки.
    """
    left: int
    bottom_offset: int
    width: int
    height: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise DimensionError(
                f'размер рамки должен быть положительным: {self}')

    @classmethod
    def parse(cls, text):
        """Рамка из строки вида ``left,bottom_offset,width,height``."""
        parts = re.split(r'[,\s]+', text.strip())
        if len(parts) != 4:
            raise ValueError(
                f'ожидалось четыре числа через запятую, получено {text!r}')
        return cls(*(int(part) for part in parts))

    @property
    def area(self):
        return self.width * self.height

    def top_origin(self, frame_height):
        """Координаты (x, y) верхнего левого угла от верха кадра."""
        return self.left, frame_height - self.bottom_offset

    def check_fits(self, frame_width, frame_height):
        x0, y0 = self.top_origin(frame_height)
        if (
            x0 < 0 or y0 < 0
            or x0 + self.width > frame_width
            or y0 + self.height > frame_height
        ):
            raise DimensionError(
                f'рамка (x={x0}, y={y0}, w={self.width}, h={self.height}) '
                f'выходит за кадр (x=0, y=0, w={frame_width}, '
                f'h={frame_height})'
            )
        return x0, y0

    def as_tuple(self):
        return self.left, self.bottom_offset, self.width, self.height


def decode_pgm(data):
    """
    Разбирает двоичный PGM (P5) с maxval 255.

    :Аргументы:
    - data: байты файла.

    :Возвращает:
    - Frame с пикселями в порядке растра (верхняя строка первой).
    """
    data = bytes(data)
    if data[:2] != PGM_MAGIC:
        raise FrameFormatError('ожидалась сигнатура P5', offset=0)
    pos = 2
    tokens = []
    while len(tokens) < 3:
        if pos >= len(data):
            raise FrameFormatError('заголовок PGM оборван', offset=pos)
        byte = data[pos:pos + 1]
        if byte in _WHITESPACE:
            pos += 1
        elif byte == b'#':
            end = data.find(b'\n', pos)
            if end == -1:
                raise FrameFormatError(
                    'комментарий без конца строки', offset=pos)
            pos = end + 1
        elif byte.isdigit():
            if data[pos - 1:pos] not in _WHITESPACE:
                raise FrameFormatError(
                    'ожидался пробел перед числом', offset=pos)
            start = pos
            while pos < len(data) and data[pos:pos + 1].isdigit():
                pos += 1
            tokens.append((int(data[start:pos]), start))
        else:
            raise FrameFormatError(
                f'неожиданный байт {byte!r} в заголовке', offset=pos)
    (width, width_at), (height, height_at), (maxval, maxval_at) = tokens
    if width <= 0:
        raise FrameFormatError('ширина должна быть положительной', width_at)
    if height <= 0:
        raise FrameFormatError('высота должна быть положительной', height_at)
    if maxval != PGM_MAXVAL:
        raise FrameFormatError(
            f'unsupported maxval {maxval}: поддерживается только 255',
            offset=maxval_at,
        )
    if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
        raise FrameFormatError('ожидался пробел перед растром', offset=pos)
    pos += 1
    size = width * height
    raster = data[pos:pos + size]
    if len(raster) < size:
        raise FrameFormatError(
            f'растр оборван: ожидалось {size} байт, получено {len(raster)}',
            offset=len(data),
        )
    if len(data) > pos + size:
        raise FrameFormatError('лишние байты после растра', offset=pos + size)
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return Frame(pixels)


def encode_pgm(frame):
    """Канонический P5: ``P5\\n<w> <h>\\n255\\n`` и растр."""
    header = f'P5\n{frame.width} {frame.height}\n{PGM_MAXVAL}\n'
    return header.encode('ascii') + frame.pixels.tobytes()


def rgb_to_luminance(r, g, b):
    """
    Яркость пикселя как среднее трёх каналов с округлением вверх от половины.

    :Аргументы:
    - r, g, b: значения каналов 0..255.
    """
    for channel in (r, g, b):
        if not 0 <= channel <= 255:
            raise ValueError(f'канал вне диапазона 0..255: {channel}')
    total = int(r) + int(g) + int(b)
    return (2 * total + 3) // 6


def crop_bbox(frame, box):
    """Вырезает рамку из кадра."""
    x0, y0 = box.check_fits(frame.width, frame.height)
    return Frame(frame.pixels[y0:y0 + box.height, x0:x0 + box.width])


def crop_clip(clip, box):
    """Вырезает рамку из всех кадров клипа: массив (кадры, h, w)."""
    if not len(clip):
        return np.zeros((0, box.height, box.width), dtype=np.uint8)
    x0, y0 = box.check_fits(clip.width, clip.height)
    return clip.array[:, y0:y0 + box.height, x0:x0 + box.width]


def frame_mean_luminance(frame):
    if frame.pixels.size == 0:
        raise EmptyInputError('кадр не содержит пикселей')
    return int(frame.pixels.sum(dtype=np.int64)) / frame.pixels.size


def write_clip(clip, directory):
    """
    Сохраняет клип каталогом PGM-файлов и файлом clip.json.

    :Аргументы:
    - clip: клип.
    - directory: путь к каталогу, создаётся при необходимости.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for number, frame in enumerate(clip, start=1):
        (directory / FRAME_NAME.format(number)).write_bytes(
            encode_pgm(frame))
    meta = {'fps': clip.fps, 'frame_count': len(clip)}
    (directory / CLIP_META).write_text(json.dumps(meta), encoding='utf-8')
    logger.debug('клип из %d кадров записан в %s', len(clip), directory)


def read_clip(directory):
    """Читает клип, сохранённый write_clip."""
    directory = Path(directory)
    meta_path = directory / CLIP_META
    if not meta_path.is_file():
        raise ClipNotFoundError(f'не найден клип: {meta_path}')
    try:
        meta = json.loads(meta_path.read_text(encoding='utf-8'))
        fps = float(meta['fps'])
        frame_count = int(meta['frame_count'])
    except (ValueError, KeyError, TypeError) as exc:
        raise FrameFormatError(f'повреждён {meta_path}: {exc}') from exc
    frames = []
    for number in range(1, frame_count + 1):
        path = directory / FRAME_NAME.format(number)
        if not path.is_file():
            raise FrameFormatError(
                f'clip.json обещает {frame_count} кадров, нет файла {path}')
        try:
            frames.append(decode_pgm(path.read_bytes()))
        except FrameFormatError as exc:
            raise FrameFormatError(f'{path}: {exc}') from exc
    extra = directory / FRAME_NAME.format(frame_count + 1)
    if extra.exists():
        raise FrameFormatError(
            f'clip.json обещает {frame_count} кадров, найден {extra}')
    return Clip.from_frames(frames, fps)


def read_corpus(directory):
    """
    Перебирает клипы корпуса: подкаталоги с clip.json по алфавиту.

    :Возвращает:
    - итератор пар (clip_id, Clip).
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ClipNotFoundError(f'не найден каталог корпуса: {directory}')
    for path in sorted(directory.iterdir()):
        if (path / CLIP_META).is_file():
            yield path.name, read_clip(path)
