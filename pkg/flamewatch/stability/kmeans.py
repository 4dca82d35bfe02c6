"""
Кластеризация k-means алгоритмом Ллойда.

Начальные центроиды выбираются методом Форги (случайные различные точки
данных), запуск повторяется с независимыми потоками случайных чисел,
сохраняется результат с наименьшей инерцией.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DataError, DimensionError, InsufficientDataError

logger = logging.getLogger(__name__)

# допуск на округление при проверке монотонности инерции
_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class KMeansModel:
    """
    Обученная модель k-means.

    :Поля:
    - k (int): число кластеров.
    - centroids (ndarray k×d): центроиды.
    - inertia (float): сумма квадратов расстояний точек обучения до
      своих центроидов.
    - iterations_run (int): итераций в лучшем запуске.
    - seed (int): зерно генератора.
    """
    k: int
    centroids: np.ndarray
    inertia: float
    iterations_run: int
    seed: int

    @property
    def dimension(self):
        return self.centroids.shape[1]


@dataclass(frozen=True, eq=False)
class LloydRun:
    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    iterations: int
    history: Tuple[float, ...]


def _squared_distances(points, centroids):
    diff = points[:, np.newaxis, :] - centroids[np.newaxis, :, :]
    return np.einsum('ijk,ijk->ij', diff, diff)


def _assign_all(points, centroids):
    distances = _squared_distances(points, centroids)
    labels = np.argmin(distances, axis=1)
    return labels, distances[np.arange(len(points)), labels]


def _check_monotone(previous, current, stage):
    assert current <= previous + _MONOTONE_SLACK * max(1.0, previous), (
        f'инерция выросла на шаге {stage}: {previous} -> {current}'
    )


def _update(points, labels, centroids, k):
    """
    Шаг обновления: центроид становится средним своих точек.

    Пустой кластер получает точку, наиболее удалённую от своего
    центроида; сама точка переходит в этот кластер.
    """
    labels = labels.copy()
    own = np.einsum(
        'ij,ij->i', points - centroids[labels], points - centroids[labels])
    counts = np.bincount(labels, minlength=k)
    for cluster in np.flatnonzero(counts == 0):
        donors = counts[labels] > 1
        if not donors.any():
            break
        farthest = int(np.argmax(np.where(donors, own, -1.0)))
        counts[labels[farthest]] -= 1
        labels[farthest] = cluster
        counts[cluster] += 1
        own[farthest] = 0.0
    updated = centroids.copy()
    for cluster in range(k):
        members = points[labels == cluster]
        if len(members):
            updated[cluster] = members.mean(axis=0)
    return updated, labels


def lloyd(points, initial, max_iter=300, tol=1e-9):
    """
    Один запуск алгоритма Ллойда.

    :Аргументы:
    - points: точки n×d.
    - initial: начальные центроиды k×d.
    - max_iter: предел числа итераций.
    - tol: порог смещения центроидов для остановки.

    :Возвращает:
    - LloydRun с историей инерции после каждого шага.
    """
    k = len(initial)
    centroids = np.array(initial, dtype=np.float64)
    labels, own = _assign_all(points, centroids)
    current = float(own.sum())
    history = [current]
    iterations = 0
    for iterations in range(1, max_iter + 1):
        updated, labels = _update(points, labels, centroids, k)
        diff = points - updated[labels]
        after_update = float(np.einsum('ij,ij->', diff, diff))
        _check_monotone(current, after_update, 'update')
        labels, own = _assign_all(points, updated)
        after_assign = float(own.sum())
        _check_monotone(after_update, after_assign, 'assign')
        history.extend((after_update, after_assign))
        shift = float(np.max(np.linalg.norm(updated - centroids, axis=1)))
        centroids = updated
        current = after_assign
        if shift < tol:
            break
    return LloydRun(
        centroids=centroids,
        labels=labels,
        inertia=current,
        iterations=iterations,
        history=tuple(history),
    )


def _forgy(points, k, rng):
    """k различных точек данных, выбранных без возвращения."""
    _, first = np.unique(points, axis=0, return_index=True)
    candidates = np.sort(first) if len(first) >= k else np.arange(len(points))
    chosen = rng.choice(candidates, size=k, replace=False)
    return points[chosen]


def _as_points(points):
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, np.newaxis]
    if points.ndim != 2:
        raise DimensionError(
            f'ожидалась матрица точек, получено {points.shape}')
    return points


def fit_kmeans(points, k=3, seed=0, restarts=10, max_iter=300, tol=1e-9):
    """
    Обучает k-means с несколькими запусками.

    :Аргументы:
    - points: точки n×d (одномерный массив трактуется как d=1).
    - k: число кластеров.
    - seed: зерно; потоки запусков выводятся из него.
    - restarts: число запусков.
    - max_iter, tol: условия остановки одного запуска.

    :Возвращает:
    - KMeansModel лучшего запуска (наименьшая инерция, затем наименьший
      номер запуска).
    """
    points = _as_points(points)
    if not np.all(np.isfinite(points)):
        raise DataError('точки содержат NaN или бесконечность')
    if len(points) < k:
        raise InsufficientDataError(
            f'точек {len(points)} меньше числа кластеров {k}')
    streams = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    for restart, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        run = lloyd(points, _forgy(points, k, rng), max_iter, tol)
        logger.debug(
            'запуск %d: инерция %.6g за %d итераций',
            restart, run.inertia, run.iterations,
        )
        if best is None or run.inertia < best.inertia:
            best = run
    return KMeansModel(
        k=k,
        centroids=best.centroids,
        inertia=best.inertia,
        iterations_run=best.iterations,
        seed=seed,
    )


def distances(model, point):
    """Квадраты расстояний от точки до каждого центроида."""
    point = np.asarray(point, dtype=np.float64).reshape(-1)
    if point.shape[0] != model.dimension:
        raise DimensionError(
            f'ожидалась размерность {model.dimension}, '
            f'получено {point.shape[0]}'
        )
    diff = model.centroids - point
    return np.einsum('ij,ij->i', diff, diff)


def assign(model, point):
    """Ближайший центроид; при равенстве наименьший номер."""
    return int(np.argmin(distances(model, point)))


def inertia(model, points):
    points = _as_points(points)
    if points.shape[1] != model.dimension:
        raise DimensionError(
            f'ожидалась размерность {model.dimension}, '
            f'получено {points.shape[1]}'
        )
    _, own = _assign_all(points, model.centroids)
    return float(own.sum())
