import numpy as np
import pytest

from conftest import finite_difference_gradient
from distributions import Gaussian
from models import (ForwardModel, GravityModel, LinearModel, apply_adjoint, apply_forward, convolution_model_1d,
                    convolution_model_2d, gaussian_psf, jacobian)
from models.convolution import blur_matrix
from models.gravity import G
from utilities.errors import CapabilityError, DimensionError, DomainError
from utilities.geometry import Continuous1D, Image2D

# Peak anomaly of the reference sphere directly above its centre
PEAK_ANOMALY = 4.0 / 3.0 * np.pi * G * 800.0 * 1000.0 ** 3 / 1500.0 ** 2


def test_psf_is_normalized_and_symmetric():
    kernel = gaussian_psf(3.0)
    assert len(kernel) % 2 == 1
    assert kernel.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(kernel, kernel[::-1])
    with pytest.raises(ValueError):
        gaussian_psf(0.0)


def test_blur_rows_sum_to_one_away_from_the_boundary():
    blur = blur_matrix(64, 2.0).toarray()
    np.testing.assert_allclose(blur[20:44].sum(axis=1), 1.0)
    assert blur[0].sum() < 1.0


def test_convolution_1d_model(rng):
    model = convolution_model_1d(40, psf_std=2.0)
    assert model.kind == "linear"
    assert model.domain_geometry == Continuous1D(40)
    x, y = rng.standard_normal(40), rng.standard_normal(40)
    assert abs((model @ x) @ y - x @ (model.T @ y)) < 1e-10
    np.testing.assert_allclose(model(x), model.to_dense() @ x, atol=1e-12)
    np.testing.assert_allclose(model.jacobian(x), model.to_dense())


def test_convolution_2d_is_separable(rng):
    model = convolution_model_2d(8, psf_std=1.0)
    assert model.domain_geometry == Image2D(8, 8)
    blur = blur_matrix(8, 1.0).toarray()
    image = rng.standard_normal((8, 8))
    blurred = model.domain_geometry.to_image(model(model.domain_geometry.to_vector(image)))
    np.testing.assert_allclose(blurred, blur @ image @ blur.T, atol=1e-12)


def test_linear_model_checks_dimensions(rng):
    model = LinearModel(rng.standard_normal((5, 3)))
    with pytest.raises(DimensionError):
        model.forward(np.ones(4))
    with pytest.raises(DimensionError):
        model.adjoint(np.ones(3))
    identity = LinearModel.identity(4)
    np.testing.assert_array_equal(identity(np.arange(4.0)), np.arange(4.0))


def test_linear_model_from_csv(tmp_path, rng):
    matrix = rng.standard_normal((6, 4))
    path = tmp_path / "A.csv"
    np.savetxt(path, matrix, delimiter=",", fmt="%.17g")
    model = LinearModel.from_csv(path)
    assert (model.range_dim, model.domain_dim) == (6, 4)
    np.testing.assert_allclose(model.to_dense(), matrix)


def test_nonlinear_model_without_jacobian():
    model = ForwardModel(lambda x: x ** 2, 3, 3, name="square")
    np.testing.assert_allclose(model(np.array([1.0, 2.0, 3.0])), [1.0, 4.0, 9.0])
    assert not model.has_jacobian
    with pytest.raises(CapabilityError):
        model.jacobian(np.ones(3))
    with pytest.raises(CapabilityError):
        model.adjoint(np.ones(3))


def test_model_output_is_a_deferred_data_mean():
    model = convolution_model_1d(16)
    mean = model.of("x")
    assert mean.tag == "model"
    assert mean.free_variables == ("x",)
    data = Gaussian(mean, sqrtcov=0.1, name="y")
    assert data.conditioning_variables == ["x"]
    assert data.dim == 16
    np.testing.assert_allclose(mean.bind({"x": np.ones(16)}), model(np.ones(16)))


def test_gravity_peak_matches_hand_value():
    model = GravityModel(m=101)
    y = model(np.array([1500.0, 800.0, 1000.0]))
    assert y[50] == pytest.approx(PEAK_ANOMALY, rel=1e-12)
    assert PEAK_ANOMALY == pytest.approx(9.9405e-5, rel=1e-3)
    assert np.argmax(y) == 50
    np.testing.assert_allclose(y, y[::-1], rtol=1e-12)


def test_gravity_default_grid():
    model = GravityModel()
    assert model.range_dim == 100
    assert model.domain_geometry.variable_names() == ["z", "rho", "r"]
    y = model(np.array([1500.0, 800.0, 1000.0]))
    assert y.max() == pytest.approx(PEAK_ANOMALY, rel=1e-2)


def test_gravity_jacobian_matches_finite_differences(rng):
    model = GravityModel()
    for _ in range(20):
        x = np.array([rng.uniform(500, 3000), rng.uniform(100, 1500), rng.uniform(200, 1500)])
        jacobian = model.jacobian(x)
        direction = rng.standard_normal(model.range_dim)
        expected = finite_difference_gradient(lambda point: model(point) @ direction, x)
        np.testing.assert_allclose(jacobian.T @ direction, expected, rtol=1e-5)
        np.testing.assert_allclose(model.gradient(direction, x), jacobian.T @ direction)


def test_gravity_rejects_non_positive_depth():
    model = GravityModel()
    with pytest.raises(DomainError):
        model(np.array([0.0, 800.0, 1000.0]))
    with pytest.raises(DomainError):
        model.jacobian(np.array([-10.0, 800.0, 1000.0]))


def test_functional_forward_and_adjoint(rng):
    model = convolution_model_1d(20, psf_std=1.5)
    x, y = rng.standard_normal(20), rng.standard_normal(20)
    np.testing.assert_allclose(apply_forward(model, x), model.forward(x))
    np.testing.assert_allclose(apply_adjoint(model, y), model.to_dense().T @ y, atol=1e-12)
    np.testing.assert_allclose(jacobian(model, x), model.to_dense())
