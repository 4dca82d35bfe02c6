"""Окна признаков: яркость пикселей рамки за несколько подряд идущих кадров."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import binfmt
from .exceptions import DimensionError, ParameterError
from .imaging import crop_clip

logger = logging.getLogger(__name__)

MATRIX_MAGIC = b'FSPX'
MATRIX_VERSION = 1


@dataclass(frozen=True, eq=False)
class FeatureWindow:
    """
    Окно признаков.

    :Поля:
    - clip_id (str): идентификатор клипа.
    - window_index (int): номер окна в клипе.
    - vector (ndarray): яркости в порядке кадр, строка, столбец.
    """
    clip_id: str
    window_index: int
    vector: np.ndarray

    def frame_range(self, window_len, stride=None):
        """Номера первого и последнего кадра окна в клипе."""
        first = self.window_index * (stride or window_len)
        return first, first + window_len - 1


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """
    Матрица окон: строка на окно.

    :Поля:
    - data (ndarray float64): матрица n×p.
    - provenance (tuple): пары (clip_id, window_index) для каждой строки.
    """
    data: np.ndarray
    provenance: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] != len(self.provenance):
            raise DimensionError(
                f'матрица {self.data.shape} не согласована с '
                f'{len(self.provenance)} строками происхождения'
            )

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]


def window_count(n_frames, window_len, stride):
    if window_len < 1 or stride < 1:
        raise ParameterError('длина окна и шаг должны быть не меньше 1')
    if n_frames < window_len:
        return 0
    return (n_frames - window_len) // stride + 1


def build_windows(clip, box, window_len=30, stride=None, clip_id=''):
    """
    Нарезает клип на окна признаков.

    :Аргументы:
    - clip: клип.
    - box: рамка.
    - window_len: кадров в окне.
    - stride: шаг между окнами, по умолчанию равен длине окна.
    - clip_id: идентификатор клипа для происхождения.

    :Возвращает:
    - список FeatureWindow; пустой, если клип короче окна.
    """
    stride = stride or window_len
    count = window_count(len(clip), window_len, stride)
    if not count:
        logger.warning(
            'клип %r короче окна: %d кадров < %d',
            clip_id, len(clip), window_len,
        )
        return []
    region = crop_clip(clip, box).copy()
    windows = []
    for index in range(count):
        first = index * stride
        vector = region[first:first + window_len].reshape(-1)
        windows.append(FeatureWindow(clip_id, index, vector))
    return windows


def unflatten(window, box, window_len):
    """Обратное преобразование: кадры рамки (кадры, h, w) из окна."""
    return np.asarray(window.vector).reshape(
        window_len, box.height, box.width)


def stack(windows, p=None):
    """
    Собирает окна в матрицу признаков.

    :Аргументы:
    - windows: последовательность FeatureWindow.
    - p: размерность признаков; обязательна для пустого входа.
    """
    windows = list(windows)
    lengths = {np.asarray(window.vector).size for window in windows}
    if p is not None:
        lengths.add(p)
    if len(lengths) > 1:
        raise DimensionError(f'окна разной длины: {sorted(lengths)}')
    if not windows:
        return FeatureMatrix(np.zeros((0, p or 0)), ())
    data = np.stack([
        np.asarray(window.vector, dtype=np.float64).reshape(-1)
        for window in windows
    ])
    provenance = tuple(
        (window.clip_id, window.window_index) for window in windows)
    return FeatureMatrix(data, provenance)


def save_matrix(matrix, path):
    writer = binfmt.SectionWriter(MATRIX_MAGIC, MATRIX_VERSION)
    with writer.section(b'SHPE') as section:
        section.u32(matrix.rows)
        section.u32(matrix.cols)
    with writer.section(b'DATA') as section:
        section.f64_array(matrix.data)
    with writer.section(b'PROV') as section:
        for clip_id, window_index in matrix.provenance:
            section.text(clip_id)
            section.u32(window_index)
    writer.write_to(path)


def load_matrix(path):
    reader = binfmt.SectionReader.open(path, MATRIX_MAGIC, (MATRIX_VERSION,))
    with reader.section(b'SHPE') as section:
        rows = section.u32()
        cols = section.u32()
    with reader.section(b'DATA') as section:
        data = section.f64_array((rows, cols))
    with reader.section(b'PROV') as section:
        provenance = tuple(
            (section.text(), section.u32()) for _ in range(rows))
    reader.finish()
    return FeatureMatrix(data, provenance)
