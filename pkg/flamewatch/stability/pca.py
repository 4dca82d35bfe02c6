"""
Метод главных компонент для матриц с числом строк много меньше числа столбцов.

Собственные векторы ищутся через матрицу Грама центрированных строк
(n×n), а не через ковариационную матрицу p×p: при p = 45 000 последняя
не помещается в память.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, InsufficientDataError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PcaModel:
    """
    Обученная модель PCA.

    :Поля:
    - mean (ndarray p): средние столбцов.
    - components (ndarray k×p): главные оси по строкам.
    - explained_variance (ndarray k): дисперсии по убыванию.
    - explained_variance_ratio (ndarray k): доли общей дисперсии.
    """
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray

    @property
    def n_components(self):
        return self.components.shape[0]

    @property
    def n_features(self):
        return self.mean.shape[0]


def _fix_signs(components):
    """Наибольший по модулю элемент каждой компоненты положителен."""
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(len(components)), pivots])
    signs[signs == 0] = 1.0
    return components * signs[:, np.newaxis]


def _complete_basis(components, count, n_features):
    """
    Дополняет набор ортонормированных строк до count строк.

    На каждом шаге берётся ось координат с наибольшим остатком после
    проекции на уже выбранные строки, при равенстве ось с меньшим номером.
    """
    basis = [np.asarray(row, dtype=np.float64) for row in components]
    while len(basis) < count:
        residual = np.ones(n_features)
        rows = np.array(basis).reshape(len(basis), n_features)
        residual -= np.einsum('ij,ij->j', rows, rows)
        axis = int(np.argmax(residual))
        candidate = np.zeros(n_features)
        candidate[axis] = 1.0
        # повторная ортогонализация гасит ошибку округления
        for _ in range(2):
            candidate -= rows.T @ (rows @ candidate)
        basis.append(candidate / np.linalg.norm(candidate))
    return np.array(basis).reshape(count, n_features)


def fit_pca(X, n_components=2):
    """
    Обучает PCA.

    :Аргументы:
    - X: FeatureMatrix или массив n×p.
    - n_components: число сохраняемых компонент.

    :Возвращает:
    - PcaModel.
    """
    data = np.asarray(getattr(X, 'data', X), dtype=np.float64)
    if data.ndim != 2:
        raise DimensionError(f'ожидалась матрица, получено {data.shape}')
    n, p = data.shape
    if n < 2:
        raise InsufficientDataError(
            f'для PCA нужно не меньше двух строк, получено {n}')
    if not 1 <= n_components <= min(n - 1, p):
        raise ParameterError(
            f'n_components={n_components} вне диапазона 1..{min(n - 1, p)}')

    mean = data.mean(axis=0)
    centered = data - mean
    gram = centered @ centered.T
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    eigenvectors = eigenvectors[:, order]

    total = eigenvalues.sum()
    tolerance = 1e-12 * eigenvalues[0]
    kept = []
    for index in range(n_components):
        value = eigenvalues[index]
        if value <= tolerance or value == 0.0:
            break
        axis = centered.T @ eigenvectors[:, index] / np.sqrt(value)
        kept.append(axis / np.linalg.norm(axis))
    if len(kept) < n_components:
        logger.warning(
            'данные вырождены: ненулевых компонент %d из %d',
            len(kept), n_components,
        )
    components = _complete_basis(kept, n_components, p)
    components = _fix_signs(components)

    variance = eigenvalues[:n_components].copy()
    variance[len(kept):] = 0.0
    variance /= n - 1
    if total > 0:
        ratio = variance / (total / (n - 1))
    else:
        ratio = np.zeros(n_components)
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance=variance,
        explained_variance_ratio=ratio,
    )


def transform(model, x):
    """
    Проекция вектора или строк матрицы в пространство главных компонент.

    :Аргументы:
    - model: PcaModel.
    - x: вектор длины p или матрица m×p.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.n_features:
        raise DimensionError(
            f'ожидалась длина {model.n_features}, получено {x.shape[-1]}')
    return (x - model.mean) @ model.components.T


def explained_variance_ratio(model):
    return tuple(float(value) for value in model.explained_variance_ratio)
