"""
Классификатор без учителя: окна признаков → PCA → k-means.

Нестабильным считается кластер с наибольшей долей окон, которые FLSC
пометил нестабильными. Новое окно нестабильно, если оно ближе к центроиду
этого кластера, чем к остальным.
"""
import csv
import dataclasses
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import binfmt
from .exceptions import DimensionError, InsufficientDataError, ModelFileError
from .features import build_windows, stack, unflatten
from .flsc import FlscConfig, classify_clip_flsc
from .imaging import BoundingBox, Clip
from .kmeans import KMeansModel, assign, distances, fit_kmeans
from .labels import StabilityLabel
from .pca import PcaModel, fit_pca, transform

logger = logging.getLogger(__name__)

MODEL_MAGIC = b'FSPM'
MODEL_VERSION = 1
SUPPORTED_VERSIONS = (MODEL_VERSION,)

GRANULARITY_WINDOW = 'window'
GRANULARITY_CLIP = 'clip'
GRANULARITIES = (GRANULARITY_WINDOW, GRANULARITY_CLIP)

PROJECTION_CSV_HEADER = (
    'clip_id', 'window_index', 'pc1', 'pc2', 'cluster', 'flsc_label',
    'is_centroid',
)
CENTROID_CLIP_ID = 'centroid'


@dataclass(frozen=True, eq=False)
class UnsupervisedModel:
    """
    Обученный классификатор.

    :Поля:
    - box (BoundingBox): рамка, по которой строились окна.
    - window_len (int): кадров в окне.
    - pca (PcaModel): проекция окон.
    - kmeans (KMeansModel): кластеры в пространстве компонент.
    - unstable_cluster (int): номер нестабильного кластера.
    - training_summary (ndarray k×3): число окон каждой метки FLSC
      (столбцы по кодам меток) в каждом кластере.
    - low_confidence (bool): кластер выбран запасным правилом.
    - label_granularity (str): метки FLSC по окну или по клипу.
    """
    box: BoundingBox
    window_len: int
    pca: PcaModel
    kmeans: KMeansModel
    unstable_cluster: int
    training_summary: np.ndarray
    low_confidence: bool = False
    label_granularity: str = GRANULARITY_WINDOW

    def __post_init__(self):
        if not 0 <= self.unstable_cluster < self.kmeans.k:
            raise DimensionError(
                f'нестабильный кластер {self.unstable_cluster} вне '
                f'0..{self.kmeans.k - 1}'
            )
        if self.pca.n_components != self.kmeans.dimension:
            raise DimensionError(
                'размерность PCA не совпадает с размерностью центроидов')

    @property
    def n_features(self):
        return self.pca.n_features

    def unstable_fraction(self):
        """Доля нестабильных окон FLSC в каждом кластере."""
        totals = self.training_summary.sum(axis=1)
        unstable = self.training_summary[:, StabilityLabel.UNSTABLE]
        return np.divide(
            unstable, totals,
            out=np.zeros(len(totals), dtype=np.float64),
            where=totals > 0,
        )


@dataclass(frozen=True)
class WindowVerdict:
    window_index: int
    first_frame: int
    last_frame: int
    cluster: int
    label: StabilityLabel
    d_unstable: float
    d_other: float


class ProjectionRow(NamedTuple):
    clip_id: str
    window_index: int
    pc1: float
    pc2: Optional[float]
    cluster: int
    flsc_label: Optional[StabilityLabel]
    is_centroid: bool
    human_label: Optional[StabilityLabel] = None


def _project(pca, vector):
    return transform(pca, np.asarray(vector, dtype=np.float64).reshape(-1))


def _window_labels(clip, windows, config, window_len, granularity):
    if granularity == GRANULARITY_CLIP:
        label = classify_clip_flsc(clip, config)
        return [label] * len(windows)
    # окно само играет роль клипа: рамка совпадает со всей вырезкой
    box = config.box
    window_config = dataclasses.replace(
        config, box=BoundingBox(0, box.height, box.width, box.height))
    return [
        classify_clip_flsc(
            Clip(unflatten(window, box, window_len), clip.fps),
            window_config,
        )
        for window in windows
    ]


def collect_windows(clips, config, window_len=30, stride=None,
                    granularity=GRANULARITY_WINDOW):
    """
    Строит окна и метки FLSC по корпусу.

    :Аргументы:
    - clips: итерируемое пар (clip_id, Clip).
    - config: FlscConfig.
    - window_len, stride: нарезка окон.
    - granularity: 'window' или 'clip'.

    :Возвращает:
    - (FeatureMatrix, список StabilityLabel по строкам).
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f'неизвестная гранулярность меток: {granularity}')
    windows = []
    labels = []
    for clip_id, clip in clips:
        clip_windows = build_windows(
            clip, config.box, window_len, stride, clip_id)
        labels.extend(_window_labels(
            clip, clip_windows, config, window_len, granularity))
        windows.extend(clip_windows)
    matrix = stack(windows, p=window_len * config.box.area)
    return matrix, labels


def _identify_unstable(points, clusters, labels, k):
    summary = np.zeros((k, len(StabilityLabel)), dtype=np.int64)
    for cluster, label in zip(clusters, labels):
        summary[cluster, label] += 1
    unstable_total = int(summary[:, StabilityLabel.UNSTABLE].sum())
    if 0 < unstable_total < len(labels):
        totals = summary.sum(axis=1)
        fraction = np.divide(
            summary[:, StabilityLabel.UNSTABLE], totals,
            out=np.zeros(k), where=totals > 0,
        )
        return int(np.argmax(fraction)), summary, False
    logger.warning(
        'нестабильных окон FLSC %d из %d: нестабильный кластер выбран по '
        'наименьшему среднему PC1, низкая уверенность',
        unstable_total, len(labels),
    )
    occupied = sorted(set(clusters.tolist()))
    pc1_means = [points[clusters == cluster, 0].mean() for cluster in occupied]
    return occupied[int(np.argmin(pc1_means))], summary, True


def train_from_windows(matrix, labels, box, window_len, seed, n_components=2,
                       k=3, restarts=10, max_iter=300, tol=1e-9,
                       granularity=GRANULARITY_WINDOW):
    """Обучает PCA и k-means на готовой матрице окон."""
    if matrix.rows < k:
        raise InsufficientDataError(
            f'окон {matrix.rows} меньше числа кластеров {k}')
    pca = fit_pca(matrix, n_components)
    points = np.array([_project(pca, row) for row in matrix.data])
    kmeans = fit_kmeans(
        points, k=k, seed=seed, restarts=restarts, max_iter=max_iter,
        tol=tol,
    )
    clusters = np.array([assign(kmeans, point) for point in points])
    unstable, summary, low_confidence = _identify_unstable(
        points, clusters, labels, k)
    logger.info(
        'обучено на %d окнах: доли дисперсии %s, нестабильный кластер %d',
        matrix.rows,
        ', '.join(f'{ratio:.3f}' for ratio in pca.explained_variance_ratio),
        unstable,
    )
    return UnsupervisedModel(
        box=box,
        window_len=window_len,
        pca=pca,
        kmeans=kmeans,
        unstable_cluster=unstable,
        training_summary=summary,
        low_confidence=low_confidence,
        label_granularity=granularity,
    )


def train_unsupervised(clips, config, seed, window_len=30, stride=None,
                       n_components=2, k=3, restarts=10, max_iter=300,
                       tol=1e-9, label_granularity=GRANULARITY_WINDOW):
    """
    Обучает классификатор без учителя на корпусе клипов.

    :Аргументы:
    - clips: итерируемое пар (clip_id, Clip).
    - config: FlscConfig для рамки и меток.
    - seed: зерно k-means.

    :Возвращает:
    - UnsupervisedModel.
    """
    matrix, labels = collect_windows(
        clips, config, window_len, stride, label_granularity)
    return train_from_windows(
        matrix, labels, config.box, window_len, seed,
        n_components=n_components, k=k, restarts=restarts,
        max_iter=max_iter, tol=tol, granularity=label_granularity,
    )


def _verdict(model, vector, window_index, first_frame):
    vector = np.asarray(vector).reshape(-1)
    if vector.shape[0] != model.n_features:
        raise DimensionError(
            f'окно длины {vector.shape[0]}, модель ожидает '
            f'{model.n_features}'
        )
    squared = distances(model.kmeans, _project(model.pca, vector))
    cluster = int(np.argmin(squared))
    d_unstable = float(squared[model.unstable_cluster])
    others = np.delete(squared, model.unstable_cluster)
    d_other = float(others.min()) if len(others) else float('inf')
    # равенство расстояний решается в пользу нестабильности
    if d_unstable <= d_other:
        label = StabilityLabel.UNSTABLE
    else:
        label = StabilityLabel.STABLE
    return WindowVerdict(
        window_index=window_index,
        first_frame=first_frame,
        last_frame=first_frame + model.window_len - 1,
        cluster=cluster,
        label=label,
        d_unstable=float(np.sqrt(d_unstable)),
        d_other=float(np.sqrt(d_other)),
    )


def inspect_vector(model, vector, window_index=0, first_frame=0):
    return _verdict(model, vector, window_index, first_frame)


def inspect_window(model, window):
    first, _ = window.frame_range(model.window_len)
    return _verdict(model, window.vector, window.window_index, first)


def classify_window(model, window):
    """Бинарная метка окна: нестабильно или стабильно."""
    return inspect_window(model, window).label


def inspect_clip(model, clip, clip_id=''):
    windows = build_windows(clip, model.box, model.window_len,
                            clip_id=clip_id)
    if not windows:
        raise InsufficientDataError(
            f'клип короче окна: {len(clip)} кадров < {model.window_len}')
    return [inspect_window(model, window) for window in windows]


def clip_label(verdicts):
    """Клип нестабилен, если нестабильно хотя бы одно его окно."""
    if any(v.label == StabilityLabel.UNSTABLE for v in verdicts):
        return StabilityLabel.UNSTABLE
    return StabilityLabel.STABLE


def classify_clip(model, clip):
    return clip_label(inspect_clip(model, clip))


def project_corpus(model, clips, config=None, human_labels=None):
    """
    Проекция окон корпуса и центроидов на плоскость главных компонент.

    :Аргументы:
    - model: UnsupervisedModel.
    - clips: итерируемое пар (clip_id, Clip).
    - config: FlscConfig для меток; по умолчанию стандартные пороги.
    - human_labels: необязательный словарь clip_id → StabilityLabel.

    :Возвращает:
    - список ProjectionRow: окна, затем k строк центроидов.
    """
    config = config or FlscConfig(box=model.box)
    human_labels = human_labels or {}
    rows = []
    for clip_id, clip in clips:
        windows = build_windows(clip, model.box, model.window_len,
                                clip_id=clip_id)
        labels = _window_labels(
            clip, windows, config, model.window_len,
            model.label_granularity)
        for window, label in zip(windows, labels):
            point = _project(model.pca, window.vector)
            rows.append(ProjectionRow(
                clip_id=clip_id,
                window_index=window.window_index,
                pc1=float(point[0]),
                pc2=float(point[1]) if len(point) > 1 else None,
                cluster=assign(model.kmeans, point),
                flsc_label=label,
                is_centroid=False,
                human_label=human_labels.get(clip_id),
            ))
    for cluster, centroid in enumerate(model.kmeans.centroids):
        rows.append(ProjectionRow(
            clip_id=CENTROID_CLIP_ID,
            window_index=cluster,
            pc1=float(centroid[0]),
            pc2=float(centroid[1]) if len(centroid) > 1 else None,
            cluster=cluster,
            flsc_label=None,
            is_centroid=True,
        ))
    return rows


def write_projection_csv(rows, stream, with_human=False):
    writer = csv.writer(stream, lineterminator='\n')
    header = PROJECTION_CSV_HEADER + (('human_label',) if with_human else ())
    writer.writerow(header)
    for row in rows:
        values = [
            row.clip_id,
            row.window_index,
            repr(row.pc1),
            '' if row.pc2 is None else repr(row.pc2),
            row.cluster,
            '' if row.flsc_label is None else int(row.flsc_label),
            int(row.is_centroid),
        ]
        if with_human:
            values.append(
                '' if row.human_label is None else int(row.human_label))
        writer.writerow(values)


def save_model(model, path):
    """
    Сохраняет модель в файл формата FSPM.

    Порядок секций: BOX, WIN, PCA, KMNS, UNST, SUMM; затем CRC-32.
    """
    writer = binfmt.SectionWriter(MODEL_MAGIC, MODEL_VERSION)
    with writer.section(b'BOX ') as section:
        for value in model.box.as_tuple():
            section.i32(value)
    with writer.section(b'WIN ') as section:
        section.u32(model.window_len)
        section.text(model.label_granularity)
    with writer.section(b'PCA ') as section:
        section.u32(model.pca.n_features)
        section.u32(model.pca.n_components)
        section.f64_array(model.pca.mean)
        section.f64_array(model.pca.components)
        section.f64_array(model.pca.explained_variance)
        section.f64_array(model.pca.explained_variance_ratio)
    with writer.section(b'KMNS') as section:
        section.u32(model.kmeans.k)
        section.u32(model.kmeans.dimension)
        section.f64_array(model.kmeans.centroids)
        section.f64(model.kmeans.inertia)
        section.u32(model.kmeans.iterations_run)
        section.i64(model.kmeans.seed)
    with writer.section(b'UNST') as section:
        section.u32(model.unstable_cluster)
        section.u8(int(model.low_confidence))
    with writer.section(b'SUMM') as section:
        rows, cols = model.training_summary.shape
        section.u32(rows)
        section.u32(cols)
        for count in model.training_summary.reshape(-1).tolist():
            section.u32(count)
    writer.write_to(path)


def load_model(path):
    """Читает модель, записанную save_model."""
    reader = binfmt.SectionReader.open(path, MODEL_MAGIC, SUPPORTED_VERSIONS)
    with reader.section(b'BOX ') as section:
        box_values = [section.i32() for _ in range(4)]
    with reader.section(b'WIN ') as section:
        window_len = section.u32()
        granularity = section.text()
    with reader.section(b'PCA ') as section:
        p = section.u32()
        m = section.u32()
        pca = PcaModel(
            mean=section.f64_array((p,)),
            components=section.f64_array((m, p)),
            explained_variance=section.f64_array((m,)),
            explained_variance_ratio=section.f64_array((m,)),
        )
    with reader.section(b'KMNS') as section:
        k = section.u32()
        d = section.u32()
        kmeans = KMeansModel(
            k=k,
            centroids=section.f64_array((k, d)),
            inertia=section.f64(),
            iterations_run=section.u32(),
            seed=section.i64(),
        )
    with reader.section(b'UNST') as section:
        unstable_cluster = section.u32()
        low_confidence = bool(section.u8())
    with reader.section(b'SUMM') as section:
        rows = section.u32()
        cols = section.u32()
        summary = np.array(
            [section.u32() for _ in range(rows * cols)], dtype=np.int64,
        ).reshape(rows, cols)
    reader.finish()
    try:
        box = BoundingBox(*box_values)
    except DimensionError as exc:
        raise ModelFileError('BOX', str(exc)) from exc
    if granularity not in GRANULARITIES:
        raise ModelFileError('WIN', f'неизвестная гранулярность {granularity}')
    try:
        return UnsupervisedModel(
            box=box,
            window_len=window_len,
            pca=pca,
            kmeans=kmeans,
            unstable_cluster=unstable_cluster,
            training_summary=summary,
            low_confidence=low_confidence,
            label_granularity=granularity,
        )
    except DimensionError as exc:
        raise ModelFileError('UNST', str(exc)) from exc
