"""
Наблюдение за пламенем по сырому потоку кадров.

Поток FSPV1: строка заголовка ``FSPV1 <ширина> <высота> <fps>\\n``, затем
кадры по ширина×высота байт яркости. Чтение и классификация идут в разных
потоках через ограниченную очередь окон: если классификатор отстаёт,
чтение ждёт, окна не теряются.
"""
import json
import logging
import queue
import threading
from dataclasses import asdict, dataclass

import numpy as np
from django.utils import timezone

from .exceptions import StreamHeaderError
from .pipeline import inspect_vector
from .synthgen import STREAM_MAGIC

logger = logging.getLogger(__name__)

MAX_HEADER_LEN = 64


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    fps: float


def read_header(stream):
    """Разбирает строку заголовка FSPV1."""
    line = stream.readline(MAX_HEADER_LEN + 1)
    if not line:
        raise StreamHeaderError('пустой поток: нет заголовка FSPV1')
    if not line.endswith(b'\n'):
        raise StreamHeaderError(
            f'заголовок не завершён переводом строки: {line[:32]!r}')
    parts = line.decode('ascii', errors='replace').split()
    if len(parts) != 4 or parts[0] != STREAM_MAGIC:
        raise StreamHeaderError(f'неверный заголовок потока: {line!r}')
    try:
        width, height, fps = int(parts[1]), int(parts[2]), float(parts[3])
    except ValueError as exc:
        raise StreamHeaderError(
            f'неверный заголовок потока: {line!r}') from exc
    if width <= 0 or height <= 0 or not fps > 0:
        raise StreamHeaderError(
            f'размеры и fps должны быть положительными: {line!r}')
    return StreamHeader(width, height, fps)


def _read_exact(stream, size):
    """Читает size байт; на конце потока возвращает сколько есть."""
    chunks = []
    remaining = size
    while remaining:
        chunk = stream.read(remaining)
        if not chunk:
            break
        chunks.append(chunk)
        remaining -= len(chunk)
    return b''.join(chunks)


@dataclass(frozen=True)
class AlertRecord:
    window: int
    first_frame: int
    last_frame: int
    label: str
    d_unstable: float
    d_other: float
    ts: str

    @classmethod
    def from_verdict(cls, verdict):
        return cls(
            window=verdict.window_index,
            first_frame=verdict.first_frame,
            last_frame=verdict.last_frame,
            label=verdict.label.slug,
            d_unstable=verdict.d_unstable,
            d_other=verdict.d_other,
            ts=timezone.now().isoformat(),
        )

    def to_json(self):
        return json.dumps(asdict(self))


@dataclass(frozen=True)
class StreamSummary:
    windows: int
    frames: int
    discarded_frames: int
    truncated_bytes: int = 0

    @property
    def truncated(self):
        return bool(self.discarded_frames or self.truncated_bytes)

    def to_json(self):
        return json.dumps({
            'summary': True,
            'windows': self.windows,
            'frames': self.frames,
            'discarded_frames': self.discarded_frames,
        })


class _Failure:
    def __init__(self, error):
        self.error = error


class Monitor:
    """
    Классификация окон потока по мере их поступления.

    :Аргументы:
    - model: UnsupervisedModel.
    - stream: двоичный поток FSPV1.
    - output: текстовый поток для записей NDJSON.
    - queue_windows: ёмкость очереди между чтением и классификацией.
    """

    def __init__(self, model, stream, output, queue_windows=4):
        self.model = model
        self.stream = stream
        self.output = output
        self.windows = queue.Queue(maxsize=queue_windows)

    def _ingest(self, header):
        model = self.model
        x0, y0 = model.box.check_fits(header.width, header.height)
        box = model.box
        frame_size = header.width * header.height
        buffer = np.empty(
            (model.window_len, box.height, box.width), dtype=np.uint8)
        filled = 0
        frames = 0
        windows = 0
        truncated_bytes = 0
        while True:
            data = _read_exact(self.stream, frame_size)
            if len(data) < frame_size:
                truncated_bytes = len(data)
                break
            pixels = np.frombuffer(data, dtype=np.uint8).reshape(
                header.height, header.width)
            buffer[filled] = pixels[y0:y0 + box.height, x0:x0 + box.width]
            filled += 1
            frames += 1
            if filled == model.window_len:
                # put блокируется, пока классификатор не освободит место
                self.windows.put(
                    (windows, windows * model.window_len, buffer.copy()))
                windows += 1
                filled = 0
        return StreamSummary(windows, frames, filled, truncated_bytes)

    def _ingest_thread(self, header):
        try:
            result = self._ingest(header)
        except Exception as exc:
            result = _Failure(exc)
        self.windows.put(result)

    def run(self):
        """
        Обрабатывает поток до конца.

        :Возвращает:
        - StreamSummary.
        """
        header = read_header(self.stream)
        logger.info(
            'поток %d×%d, %g кадров/с, окно %d кадров',
            header.width, header.height, header.fps, self.model.window_len,
        )
        reader = threading.Thread(
            target=self._ingest_thread, args=(header,), daemon=True)
        reader.start()
        while True:
            item = self.windows.get()
            if isinstance(item, _Failure):
                reader.join()
                raise item.error
            if isinstance(item, StreamSummary):
                break
            window_index, first_frame, region = item
            verdict = inspect_vector(
                self.model, region, window_index, first_frame)
            self.emit(AlertRecord.from_verdict(verdict).to_json())
        reader.join()
        summary = item
        if summary.truncated:
            logger.warning(
                'поток оборван: отброшено кадров %d, байт неполного кадра %d',
                summary.discarded_frames, summary.truncated_bytes,
            )
            self.emit(summary.to_json())
        return summary

    def emit(self, line):
        self.output.write(line + '\n')
        self.output.flush()
