"""
Генератор синтетических клипов пламени с заданными событиями.

Пламя изображается прямоугольником постоянной яркости на тёмном фоне.
Погасание опускает яркость прямоугольника до фона, ослабление опускает её
на долю depth разницы между пламенем и фоном. Шум сенсора гауссовский.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
from django.core.exceptions import ValidationError

from .exceptions import DimensionError
from .flsc import label_from_deviations
from .imaging import DEFAULT_FPS, BoundingBox, Clip
from .labels import StabilityLabel

logger = logging.getLogger(__name__)

EXTINCTION = 'extinction'
DIMMING = 'dimming'
EVENT_TYPES = (EXTINCTION, DIMMING)

STREAM_MAGIC = 'FSPV1'

# ширина шумового коридора в стандартных отклонениях среднего по рамке
NOISE_ENVELOPE_Z = 4.0
# наибольшее смещение среднего пикселя из-за обрезки шума на границах 0 и 255
CLAMP_BIAS = 0.4


@dataclass(frozen=True)
class Event:
    """
    Событие в клипе.

    :Поля:
    - start_frame (int): первый кадр события.
    - end_frame (int): последний кадр события, включительно.
    - type (str): ``extinction`` или ``dimming``.
    - depth (float): доля падения яркости, в (0, 1].
    """
    start_frame: int
    end_frame: int
    type: str = EXTINCTION
    depth: float = 1.0

    @property
    def drop(self):
        return 1.0 if self.type == EXTINCTION else self.depth

    def covers(self, frame_index):
        return self.start_frame <= frame_index <= self.end_frame


@dataclass(frozen=True)
class Scenario:
    """Параметры синтетического клипа."""
    width: int = 640
    height: int = 480
    fps: float = DEFAULT_FPS
    duration: int = 90
    flame_region: BoundingBox = BoundingBox(450, 270, 30, 50)
    base_luminance: int = 150
    background_luminance: int = 5
    events: Tuple[Event, ...] = field(default_factory=tuple)
    noise_sigma: float = 0.0
    seed: int = 0

    def violations(self):
        errors = []
        if self.width <= 0 or self.height <= 0:
            errors.append(
                f'размер кадра должен быть положительным: '
                f'{self.width}×{self.height}'
            )
        if self.fps <= 0:
            errors.append(f'fps должен быть положительным: {self.fps}')
        if self.duration < 1:
            errors.append(f'длительность должна быть >= 1: {self.duration}')
        if self.width > 0 and self.height > 0:
            try:
                self.flame_region.check_fits(self.width, self.height)
            except DimensionError as exc:
                errors.append(str(exc))
        if not (
            0 <= self.background_luminance < self.base_luminance <= 255
        ):
            errors.append(
                'нужно 0 <= background_luminance < base_luminance <= 255, '
                f'получено {self.background_luminance} и '
                f'{self.base_luminance}'
            )
        if self.noise_sigma < 0:
            errors.append(
                f'noise_sigma не может быть отрицательным: {self.noise_sigma}')
        for number, event in enumerate(self.events):
            if not 0 <= event.start_frame <= event.end_frame < self.duration:
                errors.append(
                    f'событие {number}: кадры {event.start_frame}..'
                    f'{event.end_frame} вне 0..{self.duration - 1}'
                )
            if event.type not in EVENT_TYPES:
                errors.append(
                    f'событие {number}: неизвестный тип {event.type!r}')
            if not 0 < event.depth <= 1:
                errors.append(
                    f'событие {number}: depth={event.depth} вне (0, 1]')
        return errors

    def validate(self):
        errors = self.violations()
        if errors:
            raise ValidationError(errors)

    def to_dict(self):
        data = asdict(self)
        data['flame_region'] = list(self.flame_region.as_tuple())
        data['events'] = [asdict(event) for event in self.events]
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValidationError('сценарий должен быть объектом JSON')
        known = {name for name in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f'неизвестные поля сценария: {unknown}')
        values = dict(data)
        try:
            if 'flame_region' in values:
                values['flame_region'] = BoundingBox(*values['flame_region'])
            values['events'] = tuple(
                Event(**event) for event in values.get('events', ()))
        except (TypeError, DimensionError) as exc:
            raise ValidationError(f'неверное описание сценария: {exc}')
        scenario = cls(**values)
        scenario.validate()
        return scenario

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f'неверный JSON: {exc}')
        return cls.from_dict(data)


def frame_levels(scenario):
    """Яркость прямоугольника пламени в каждом кадре без учёта шума."""
    drops = np.zeros(scenario.duration)
    for event in scenario.events:
        window = slice(event.start_frame, event.end_frame + 1)
        drops[window] = np.maximum(drops[window], event.drop)
    span = scenario.base_luminance - scenario.background_luminance
    return np.rint(scenario.base_luminance - drops * span).astype(np.int64)


def generate_clip(scenario):
    """
    Строит клип по сценарию.

    Результат полностью определяется сценарием, включая зерно шума.
    """
    scenario.validate()
    region = scenario.flame_region
    x0, y0 = region.check_fits(scenario.width, scenario.height)
    frames = np.full(
        (scenario.duration, scenario.height, scenario.width),
        scenario.background_luminance, dtype=np.float64,
    )
    frames[:, y0:y0 + region.height, x0:x0 + region.width] = (
        frame_levels(scenario)[:, np.newaxis, np.newaxis])
    if scenario.noise_sigma > 0:
        rng = np.random.default_rng(scenario.seed)
        frames += rng.normal(0.0, scenario.noise_sigma, size=frames.shape)
        frames = np.rint(frames)
    return Clip(np.clip(frames, 0, 255).astype(np.uint8), scenario.fps)


def _overlap(box, region, frame_height):
    bx, by = box.top_origin(frame_height)
    rx, ry = region.top_origin(frame_height)
    width = min(bx + box.width, rx + region.width) - max(bx, rx)
    height = min(by + box.height, ry + region.height) - max(by, ry)
    return max(width, 0) * max(height, 0)


def _exact_label(sums, area, config):
    total = sum(sums)
    if total == 0:
        return StabilityLabel.UNSTABLE
    clip_mean = total / (len(sums) * area)
    deviations = [
        abs(frame_sum / area - clip_mean) / clip_mean for frame_sum in sums
    ]
    return label_from_deviations(deviations, config)


def _envelope_label(sums, area, config, margin):
    clip_mean = sum(sums) / (len(sums) * area)
    if clip_mean - margin <= 0:
        return None
    spread = [abs(frame_sum / area - clip_mean) for frame_sum in sums]
    optimistic = label_from_deviations(
        [max(value - 2 * margin, 0.0) / (clip_mean + margin)
         for value in spread],
        config,
    )
    pessimistic = label_from_deviations(
        [(value + 2 * margin) / (clip_mean - margin) for value in spread],
        config,
    )
    if optimistic != pessimistic:
        return None
    return optimistic


def expected_label(scenario, config):
    """
    Аналитическая метка FLSC для сценария без учёта шума.

    :Аргументы:
    - scenario: Scenario.
    - config: FlscConfig.

    :Возвращает:
    - StabilityLabel или None, если шум сценария может изменить метку.
    """
    scenario.validate()
    box = config.box
    box.check_fits(scenario.width, scenario.height)
    area = box.area
    lit = _overlap(box, scenario.flame_region, scenario.height)
    background = scenario.background_luminance
    levels = frame_levels(scenario)
    sums = [
        lit * int(level) + (area - lit) * background for level in levels
    ]
    sigma = scenario.noise_sigma
    if sigma == 0:
        return _exact_label(sums, area, config)
    margin = NOISE_ENVELOPE_Z * sigma / math.sqrt(area)
    reach = NOISE_ENVELOPE_Z * sigma
    if background < reach or levels.max() > 255 - reach:
        margin += CLAMP_BIAS * sigma
    return _envelope_label(sums, area, config, margin)


def calibrated_noise_sigma(box, ceiling=0.4, z=3.0):
    """
    Шум пикселя, при котором среднее по рамке отклоняется не больше чем на
    ceiling единиц яркости в пределах z стандартных отклонений.
    """
    return ceiling * math.sqrt(box.area) / z


def random_scenario(rng, box, width=64, height=64, duration=30,
                    noise_sigma=0.0, max_events=3, max_event_len=5):
    """
    Случайный сценарий для серийной проверки классификатора.

    :Аргументы:
    - rng: numpy.random.Generator.
    - box: рамка; пламя совпадает с ней.
    - width, height, duration: размер клипа.
    - noise_sigma: шум пикселя.
    - max_events, max_event_len: число и длина событий.
    """
    background = int(rng.integers(0, 60))
    base = int(rng.integers(background + 40, 231))
    events = []
    for _ in range(int(rng.integers(0, max_events + 1))):
        length = int(rng.integers(1, max_event_len + 1))
        start = int(rng.integers(0, duration - length + 1))
        kind = EVENT_TYPES[int(rng.integers(0, len(EVENT_TYPES)))]
        depth = float(rng.uniform(0.02, 1.0))
        events.append(Event(start, start + length - 1, kind, depth))
    return Scenario(
        width=width,
        height=height,
        duration=duration,
        flame_region=box,
        base_luminance=base,
        background_luminance=background,
        events=tuple(events),
        noise_sigma=noise_sigma,
        seed=int(rng.integers(0, 2 ** 31)),
    )


@dataclass(frozen=True)
class CorpusEntry:
    clip_id: str
    scenario: Scenario
    truth: StabilityLabel

    def clip(self):
        return generate_clip(self.scenario)


def synthetic_corpus(n_stable, n_unstable, seed, box, width=64, height=64,
                     duration=90, window_len=30, noise_sigma=None,
                     base_range=(100, 200), prefix='clip'):
    """
    Корпус стабильных клипов и клипов с отрывами пламени.

    Яркость пламени своя у каждого клипа и берётся из base_range. В каждом
    нестабильном клипе от одного до трёх окон, в которых пламя горит один
    или два первых кадра, а затем отрывается от сопла до конца окна.
    Порядок клипов перемешан.

    :Возвращает:
    - список CorpusEntry; сами клипы строятся лениво через entry.clip().
    """
    if noise_sigma is None:
        noise_sigma = calibrated_noise_sigma(box)
    template = Scenario(
        width=width,
        height=height,
        duration=duration,
        flame_region=box,
        background_luminance=5,
        noise_sigma=noise_sigma,
    )
    low, high = base_range
    if not template.background_luminance < low <= high <= 255:
        raise ValidationError(
            f'яркость пламени {low}..{high} должна лежать в '
            f'{template.background_luminance + 1}..255'
        )
    rng = np.random.default_rng(seed)
    kinds = (
        [StabilityLabel.STABLE] * n_stable
        + [StabilityLabel.UNSTABLE] * n_unstable
    )
    rng.shuffle(kinds)
    entries = []
    for number, truth in enumerate(kinds):
        events = ()
        if truth == StabilityLabel.UNSTABLE:
            events = _detachments(rng, duration, window_len)
        scenario = replace(
            template,
            base_luminance=int(rng.integers(low, high + 1)),
            events=events,
            seed=int(rng.integers(0, 2 ** 31)),
        )
        entries.append(
            CorpusEntry(f'{prefix}_{number:03d}', scenario, truth))
    logger.debug(
        'синтетический корпус: %d стабильных, %d нестабильных',
        n_stable, n_unstable,
    )
    return entries


def _detachments(rng, duration, window_len):
    windows = max(duration // window_len, 1)
    count = int(rng.integers(1, min(3, windows) + 1))
    chosen = rng.choice(windows, size=count, replace=False)
    events = []
    for window in sorted(chosen.tolist()):
        first = window * window_len
        last = min(first + window_len, duration) - 1
        # окно начинается с горящего пламени
        lead = min(int(rng.integers(1, 3)), last - first)
        events.append(Event(first + lead, last, EXTINCTION, 1.0))
    return tuple(events)


def stream_header(width, height, fps):
    return f'{STREAM_MAGIC} {width} {height} {fps:g}\n'.encode('ascii')


def write_stream(clips, stream, fps: Optional[float] = None):
    """
    Пишет клипы одного размера в сырой поток FSPV1.

    :Возвращает:
    - число записанных кадров.
    """
    written = 0
    header_sent = False
    shape = None
    for clip in clips:
        if not len(clip):
            continue
        if not header_sent:
            shape = (clip.height, clip.width)
            stream.write(
                stream_header(clip.width, clip.height, fps or clip.fps))
            header_sent = True
        elif (clip.height, clip.width) != shape:
            raise DimensionError(
                f'клипы разного размера: {shape} и '
                f'{(clip.height, clip.width)}'
            )
        stream.write(np.ascontiguousarray(clip.array).tobytes())
        written += len(clip)
    return written
