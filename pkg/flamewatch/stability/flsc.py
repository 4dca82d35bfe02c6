"""
Классификатор стабильности по флуктуациям яркости (FLSC).

Средняя яркость рамки у сопла считается по всему клипу, затем для каждого
кадра вычисляется относительное отклонение его средней яркости от
среднего по клипу. Порог 25% означает нестабильное пламя, 15% означает
неуверенную оценку.
"""
import csv
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError

from .exceptions import DarkClipError, EmptyInputError
from .imaging import BoundingBox, crop_clip
from .labels import StabilityLabel

logger = logging.getLogger(__name__)

DEVIATION_CSV_HEADER = ('frame', 'frame_mean', 'relative_deviation')


@dataclass(frozen=True)
class FlscConfig:
    """
    Настройки классификатора.

    :Поля:
    - box (BoundingBox): рамка у сопла.
    - unstable_threshold (float): доля отклонения, выше которой пламя
      нестабильно.
    - uncertain_threshold (float): доля отклонения, выше которой оценка
      неуверенная.
    """
    box: BoundingBox
    unstable_threshold: float = 0.25
    uncertain_threshold: float = 0.15

    def __post_init__(self):
        if not (
            0 < self.uncertain_threshold < self.unstable_threshold < 1
        ):
            raise ValidationError(
                'Пороги должны удовлетворять 0 < uncertain < unstable < 1, '
                f'получено uncertain={self.uncertain_threshold}, '
                f'unstable={self.unstable_threshold}.'
            )

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'box': BoundingBox(*settings.FLSC_BOUNDING_BOX),
            'unstable_threshold': settings.FLSC_UNSTABLE_THRESHOLD,
            'uncertain_threshold': settings.FLSC_UNCERTAIN_THRESHOLD,
        }
        values.update(
            {key: value for key, value in overrides.items()
             if value is not None}
        )
        return cls(**values)


@dataclass(frozen=True)
class FrameDeviation:
    frame_index: int
    frame_mean: float
    relative_deviation: float


@dataclass(frozen=True)
class DeviationSeries:
    """
    Отклонения яркости кадров от среднего по клипу.

    :Поля:
    - clip_mean (float): средняя яркость рамки по клипу.
    - per_frame (tuple): FrameDeviation на каждый кадр по порядку.
    """
    clip_mean: float
    per_frame: Tuple[FrameDeviation, ...]

    @property
    def deviations(self):
        return [entry.relative_deviation for entry in self.per_frame]

    @property
    def max_deviation(self):
        return max(self.deviations, default=0.0)


def _frame_sums(clip, box):
    if not len(clip):
        raise EmptyInputError('клип не содержит кадров')
    region = crop_clip(clip, box)
    return region.reshape(len(clip), -1).sum(axis=1, dtype=np.int64)


def clip_mean_luminance(clip, box):
    """Средняя яркость всех пикселей рамки по всем кадрам клипа."""
    sums = _frame_sums(clip, box)
    # целочисленная сумма точна и не зависит от порядка
    return int(sums.sum()) / (len(clip) * box.area)


def deviation_series(clip, config):
    """
    Относительные отклонения средних по кадрам от среднего по клипу.

    :Аргументы:
    - clip: клип.
    - config: FlscConfig.

    :Возвращает:
    - DeviationSeries с одной записью на кадр.
    """
    sums = _frame_sums(clip, config.box)
    area = config.box.area
    total = int(sums.sum())
    if total == 0:
        raise DarkClipError('рамка тёмная во всех кадрах клипа')
    clip_mean = total / (len(clip) * area)
    per_frame = []
    for index, frame_sum in enumerate(sums.tolist()):
        frame_mean = frame_sum / area
        per_frame.append(FrameDeviation(
            frame_index=index,
            frame_mean=frame_mean,
            relative_deviation=abs(frame_mean - clip_mean) / clip_mean,
        ))
    return DeviationSeries(clip_mean=clip_mean, per_frame=tuple(per_frame))


def label_from_deviations(deviations, config):
    """Пороговое правило: нестабильность важнее неуверенности."""
    worst = max(deviations, default=0.0)
    if worst > config.unstable_threshold:
        return StabilityLabel.UNSTABLE
    if worst > config.uncertain_threshold:
        return StabilityLabel.UNCERTAIN
    return StabilityLabel.STABLE


def classify_clip_flsc(clip, config):
    """
    Тернарная метка стабильности клипа.

    Клип с полностью тёмной рамкой считается нестабильным: пламя оторвано
    от сопла.
    """
    try:
        series = deviation_series(clip, config)
    except DarkClipError:
        logger.info('тёмный клип классифицирован как нестабильный')
        return StabilityLabel.UNSTABLE
    return label_from_deviations(series.deviations, config)


def noise_ceiling(clip, box):
    """
    Наибольшее отклонение средней яркости кадра от среднего по клипу.

    Для неподвижной области без пламени это оценка шума сенсора
    в единицах яркости.
    """
    sums = _frame_sums(clip, box)
    means = sums / box.area
    clip_mean = int(sums.sum()) / (len(clip) * box.area)
    return float(np.max(np.abs(means - clip_mean)))


def write_deviation_csv(series, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(DEVIATION_CSV_HEADER)
    for entry in series.per_frame:
        writer.writerow((
            entry.frame_index,
            repr(entry.frame_mean),
            repr(entry.relative_deviation),
        ))
