import numpy as np
import pytest

from stability.exceptions import (
    DimensionError, InsufficientDataError, ParameterError,
)
from stability.pca import explained_variance_ratio, fit_pca, transform

N_MATRICES = 20
N_DIRECTIONS = 200


def random_matrices():
    rng = np.random.default_rng(4242)
    for _ in range(N_MATRICES):
        n = int(rng.integers(3, 11))
        p = int(rng.integers(2, 51))
        scale = rng.uniform(0.5, 5.0, size=p)
        yield rng.normal(size=(n, p)) * scale + rng.normal(size=p)


def dense_projection(data, k):
    centered = data - data.mean(axis=0)
    covariance = centered.T @ centered / (len(data) - 1)
    values, vectors = np.linalg.eigh(covariance)
    order = np.argsort(values)[::-1][:k]
    return centered @ vectors[:, order], values[order]


def test_gram_projection_matches_dense_covariance():
    for data in random_matrices():
        k = min(2, len(data) - 1, data.shape[1])
        model = fit_pca(data, n_components=k)
        ours = transform(model, data)
        dense, variance = dense_projection(data, k)
        for column in range(k):
            sign = np.sign(ours[:, column] @ dense[:, column]) or 1.0
            assert np.allclose(
                ours[:, column], sign * dense[:, column], atol=1e-8
            ), "Проекции через матрицу Грама должны совпадать с плотным PCA."
        assert np.allclose(model.explained_variance, variance, atol=1e-8)


def test_components_are_orthonormal():
    for data in random_matrices():
        k = min(3, len(data) - 1, data.shape[1])
        model = fit_pca(data, n_components=k)
        gram = model.components @ model.components.T
        assert np.allclose(gram, np.eye(k), atol=1e-9)


def test_first_component_maximises_variance():
    rng = np.random.default_rng(99)
    for data in random_matrices():
        model = fit_pca(data, n_components=1)
        centered = data - data.mean(axis=0)
        best = model.explained_variance[0]
        directions = rng.normal(size=(N_DIRECTIONS, data.shape[1]))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        variances = (centered @ directions.T).var(axis=0, ddof=1)
        assert np.all(variances <= best * (1 + 1e-9) + 1e-12)


def test_largest_entry_of_each_component_is_positive():
    data = np.random.default_rng(3).normal(size=(6, 10))
    model = fit_pca(data, n_components=2)
    for component in model.components:
        assert component[np.argmax(np.abs(component))] > 0


def test_explained_variance_ratio_is_bounded():
    data = np.random.default_rng(5).normal(size=(8, 20))
    model = fit_pca(data, n_components=3)
    ratio = explained_variance_ratio(model)
    assert len(ratio) == 3
    assert all(0 <= value <= 1 for value in ratio)
    assert sum(ratio) <= 1 + 1e-12
    assert list(ratio) == sorted(ratio, reverse=True)


def test_identical_rows_are_degenerate(caplog):
    data = np.tile(np.arange(5.0), (4, 1))
    model = fit_pca(data, n_components=2)
    assert np.allclose(model.explained_variance, 0.0)
    assert np.allclose(model.components @ model.components.T, np.eye(2))
    assert np.allclose(transform(model, data), 0.0)
    assert "вырождены" in caplog.text


def test_collinear_data_has_one_informative_component():
    t = np.array([0.0, 1.0, 2.0, 3.0])
    data = np.outer(t, [1.0, 2.0, 2.0])
    model = fit_pca(data, n_components=2)
    assert np.allclose(model.components[0], [1 / 3, 2 / 3, 2 / 3])
    assert model.explained_variance_ratio[0] == pytest.approx(1.0)
    assert model.explained_variance[1] == 0.0


def test_too_few_rows():
    with pytest.raises(InsufficientDataError):
        fit_pca(np.ones((1, 4)))


def test_too_many_components():
    with pytest.raises(ParameterError):
        fit_pca(np.random.default_rng(0).normal(size=(3, 5)), n_components=3)


def test_transform_checks_length():
    model = fit_pca(np.random.default_rng(0).normal(size=(4, 5)))
    with pytest.raises(DimensionError):
        transform(model, np.zeros(6))


def test_mean_plus_first_component_maps_to_unit_axis():
    data = np.random.default_rng(21).normal(size=(8, 12))
    model = fit_pca(data, n_components=2)
    assert np.allclose(transform(model, model.mean), [0.0, 0.0], atol=1e-12)
    point = model.mean + model.components[0]
    assert np.allclose(transform(model, point), [1.0, 0.0], atol=1e-9)


def test_transform_is_affine():
    rng = np.random.default_rng(22)
    data = rng.normal(size=(9, 15))
    model = fit_pca(data, n_components=3)
    for _ in range(20):
        direction = rng.normal(size=15)
        scale = rng.uniform(-5, 5)
        assert np.allclose(
            transform(model, model.mean + scale * direction),
            scale * transform(model, model.mean + direction),
            atol=1e-9,
        )


def test_reconstruction_beats_random_bases():
    rng = np.random.default_rng(23)
    for data in random_matrices():
        k = min(2, len(data) - 1, data.shape[1])
        model = fit_pca(data, n_components=k)
        centered = data - model.mean
        ours = centered @ model.components.T @ model.components
        error = ((centered - ours) ** 2).sum()
        for _ in range(10):
            basis, _ = np.linalg.qr(rng.normal(size=(data.shape[1], k)))
            other = centered @ basis @ basis.T
            assert error <= ((centered - other) ** 2).sum() + 1e-9, (
                "Главные компоненты дают наименьшую ошибку восстановления."
            )


def test_line_through_origin():
    data = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [-1.0, -2.0]])
    model = fit_pca(data, n_components=1)
    assert np.allclose(model.components[0], np.array([1.0, 2.0]) / 5 ** 0.5)
    assert model.explained_variance_ratio[0] == pytest.approx(1.0)


def test_isotropic_sample_splits_variance_evenly():
    data = np.random.default_rng(24).normal(size=(2000, 2))
    ratio = explained_variance_ratio(fit_pca(data, n_components=1))
    assert ratio[0] == pytest.approx(0.5, abs=0.05)


def test_rank_deficient_data_completes_basis():
    data = np.random.default_rng(0).normal(size=(6, 5))
    data -= data.mean(axis=1, keepdims=True)
    model = fit_pca(data, n_components=5)
    assert model.components.shape == (5, 5)
    assert np.allclose(
        model.components @ model.components.T, np.eye(5), atol=1e-9)
    assert np.allclose(
        np.abs(model.components[-1]), np.ones(5) / 5 ** 0.5, atol=1e-9), (
        "Последняя компонента вырожденных данных направлена вдоль единиц."
    )
    assert model.explained_variance[-1] == pytest.approx(0.0, abs=1e-12)
