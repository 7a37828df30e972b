import numpy as np
import pytest
from scipy import stats

from conftest import finite_difference_gradient
from distributions import (CMRF, GMRF, LMRF, Gamma, Gaussian, Lognormal, Uniform, UserDefined, condition, grad_logpdf,
                           logpdf, sample_direct)
from distributions.gaussian import GaussianPrecision, dense_covariance, isotropic_precision
from utilities.deferred import Deferred
from utilities.errors import CapabilityError, ConditioningError, DimensionError, FactorizationError
from utilities.geometry import Image2D
from utilities.linalg import CholeskyFactor, gmrf_precision


def _spd(rng, n):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


@pytest.mark.parametrize("parameterization", ["cov", "prec", "sqrtcov", "sqrtprec"])
def test_gaussian_logpdf_matches_scipy_for_every_parameterization(parameterization, rng):
    mean = rng.standard_normal(4)
    cov = _spd(rng, 4)
    values = {
        "cov": cov,
        "prec": np.linalg.inv(cov),
        "sqrtcov": np.linalg.cholesky(cov),
        "sqrtprec": np.linalg.cholesky(np.linalg.inv(cov)).T,
    }
    dist = Gaussian(mean, **{parameterization: values[parameterization]})
    x = rng.standard_normal(4)
    assert dist.logpdf(x) == pytest.approx(stats.multivariate_normal(mean, cov).logpdf(x), rel=1e-10)
    np.testing.assert_allclose(dense_covariance(dist), cov, rtol=1e-8, atol=1e-10)


def test_gaussian_scalar_and_diagonal_covariances(rng):
    x = rng.standard_normal(3)
    isotropic = Gaussian(np.zeros(3), 4.0)
    assert isotropic.logpdf(x) == pytest.approx(stats.multivariate_normal(np.zeros(3), 4.0).logpdf(x))
    assert isotropic_precision(isotropic) == pytest.approx(0.25)
    diagonal = Gaussian(np.ones(3), sqrtcov=np.array([1.0, 2.0, 3.0]))
    expected = stats.multivariate_normal(np.ones(3), np.diag([1.0, 4.0, 9.0])).logpdf(x)
    assert diagonal.logpdf(x) == pytest.approx(expected)
    with pytest.raises(ConditioningError):
        isotropic_precision(diagonal)
    univariate = Gaussian(1.0, 2.0)
    assert univariate.dim == 1
    assert univariate.pdf(0.5) == pytest.approx(stats.norm(1.0, np.sqrt(2.0)).pdf(0.5))


def test_full_precision_is_applied_without_refactoring(rng, monkeypatch):
    q = _spd(rng, 4)
    v = rng.standard_normal(4)
    from_prec = GaussianPrecision("prec", q, 4)
    root = np.linalg.cholesky(q).T
    from_root = GaussianPrecision("sqrtprec", root, 4)
    monkeypatch.setattr(CholeskyFactor, "reconstruct", lambda factor: pytest.fail("precision rebuilt from its factor"))
    np.testing.assert_allclose(from_prec.apply(v), q @ v)
    np.testing.assert_allclose(from_root.apply(v), q @ v, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(from_prec.to_dense(), q)


def test_gaussian_gradient_matches_finite_differences(rng):
    dist = Gaussian(rng.standard_normal(5), cov=_spd(rng, 5))
    for _ in range(20):
        x = rng.standard_normal(5)
        np.testing.assert_allclose(dist.gradient(x), finite_difference_gradient(dist.logpdf, x), rtol=1e-5,
                                   atol=1e-8)


def test_gaussian_direct_samples_have_the_right_moments(rng):
    cov = np.array([[2.0, 0.6], [0.6, 1.0]])
    samples = Gaussian(np.array([1.0, -1.0]), cov).sample(40000, rng)
    assert samples.n_samples == 40000
    assert samples.provenance["sampler"] == "direct"
    np.testing.assert_allclose(samples.mean(), [1.0, -1.0], atol=0.03)
    np.testing.assert_allclose(np.cov(samples.draws.T), cov, atol=0.06)


def test_gaussian_rejects_bad_input():
    with pytest.raises(ValueError):
        Gaussian(0.0, cov=1.0, prec=1.0)
    with pytest.raises(FactorizationError):
        Gaussian(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]])).logpdf(np.zeros(2))
    with pytest.raises(DimensionError):
        Gaussian(np.zeros(3), 1.0).logpdf(np.zeros(2))


def test_conditioning_is_strict_and_partial():
    dist = Gaussian(Deferred.identity("x"), prec=Deferred.identity("s"), name="y")
    assert str(dist) == "Gaussian. Conditioning variables ['x', 's']."
    assert not dist.is_fully_specified
    with pytest.raises(ConditioningError):
        dist.logpdf(np.zeros(1))
    with pytest.raises(ConditioningError, match="valid names"):
        dist.condition(z=1.0)
    assert dist.condition({}) is dist

    partial = dist(s=4.0)
    assert partial.conditioning_variables == ["x"]
    full = partial(x=np.array([1.0, 2.0]))
    assert full.is_fully_specified
    assert str(full) == "Gaussian."
    assert full.logpdf(np.array([1.0, 2.0])) == pytest.approx(2 * 0.5 * np.log(4.0 / (2 * np.pi)))


def test_gmrf_matches_dense_gaussian(rng):
    for dims, n, geometry in ((1, 6, None), (2, 9, Image2D(3, 3))):
        mean = rng.standard_normal(n)
        dist = GMRF(mean, 3.0, geometry=geometry)
        assert dist.dims == dims
        precision = gmrf_precision(n, 3.0, dims).to_dense()
        x = rng.standard_normal(n)
        expected = stats.multivariate_normal(mean, np.linalg.inv(precision)).logpdf(x)
        assert dist.logpdf(x) == pytest.approx(expected, rel=1e-9)
        np.testing.assert_allclose(dist.gradient(x), finite_difference_gradient(dist.logpdf, x), rtol=1e-5,
                                   atol=1e-7)
        sqrt = dist.sqrt_precision().to_dense()
        np.testing.assert_allclose(sqrt.T @ sqrt, precision, atol=1e-10)


def test_gmrf_direct_samples_have_the_gmrf_covariance(rng):
    dist = GMRF(np.zeros(4), 2.0)
    samples = dist.sample(40000, rng)
    expected = np.linalg.inv(gmrf_precision(4, 2.0).to_dense())
    np.testing.assert_allclose(np.cov(samples.draws.T), expected, atol=0.03)


def test_gmrf_needs_a_size_and_a_positive_precision():
    with pytest.raises(ValueError):
        GMRF(0.0, 1.0)
    with pytest.raises(ValueError):
        GMRF(np.zeros(3), -1.0)


def test_lmrf_logpdf_by_hand():
    dist = LMRF(np.zeros(3), 0.5)
    x = np.array([1.0, -1.0, 2.0])
    total_variation = 1.0 + 2.0 + 3.0 + 2.0
    assert dist.total_variation(x) == pytest.approx(total_variation)
    assert dist.n_difference_terms == 4
    assert dist.logpdf(x) == pytest.approx(-total_variation / 0.5 - 4 * np.log(1.0))
    assert not dist.has_gradient
    with pytest.raises(CapabilityError):
        dist.gradient(x)
    with pytest.raises(CapabilityError):
        dist.sample(1)


def test_lmrf_on_images_averages_both_directions():
    dist = LMRF(0.0, 1.0, geometry=Image2D(2, 2))
    assert dist.dims == 2
    assert dist.n_difference_terms == 12
    x = Image2D(2, 2).to_vector(np.array([[1.0, 0.0], [0.0, 0.0]]))
    # Two unit jumps in each direction
    assert dist.total_variation(x) == pytest.approx(0.5 * 2 + 0.5 * 2)


def test_cmrf_gradient_matches_finite_differences(rng):
    for dist in (CMRF(np.zeros(7), 0.3), CMRF(0.0, 0.5, geometry=Image2D(3, 3))):
        assert dist.has_gradient
        for _ in range(20):
            x = rng.standard_normal(dist.dim)
            np.testing.assert_allclose(dist.gradient(x), finite_difference_gradient(dist.logpdf, x),
                                       rtol=1e-5, atol=1e-7)
    assert CMRF(np.zeros(5), 1.0).logpdf(np.zeros(5)) == pytest.approx(0.0)


def test_gamma_matches_scipy(rng):
    dist = Gamma(2.5, 3.0)
    for x in (0.1, 1.0, 4.0):
        assert dist.logpdf(x) == pytest.approx(stats.gamma(2.5, scale=1 / 3.0).logpdf(x))
        assert dist.gradient(x)[0] == pytest.approx(finite_difference_gradient(dist.logpdf, [x])[0], rel=1e-5)
    assert dist.logpdf(-1.0) == -np.inf
    assert dist.logpdf(0.0) == -np.inf
    samples = dist.sample(40000, rng)
    assert samples.mean()[0] == pytest.approx(2.5 / 3.0, rel=0.02)
    np.testing.assert_allclose(dist.initial_value(), [2.5 / 3.0])
    with pytest.raises(ValueError):
        Gamma(0.0, 1.0)


def test_lognormal_matches_scipy():
    dist = Lognormal(5.0, 1.0)
    for x in (10.0, 150.0, 900.0):
        expected = stats.lognorm(s=1.0, scale=np.exp(5.0)).logpdf(x)
        assert dist.logpdf(x) == pytest.approx(expected)
        assert dist.gradient(x)[0] == pytest.approx(finite_difference_gradient(dist.logpdf, [x])[0], rel=1e-5)
    assert dist.logpdf(-2.0) == -np.inf


def test_uniform_support():
    dist = Uniform(np.zeros(2), np.array([1.0, 2.0]))
    assert dist.logpdf([0.5, 1.5]) == pytest.approx(-np.log(2.0))
    assert dist.logpdf([1.5, 1.5]) == -np.inf
    assert not dist.has_gradient
    with pytest.raises(ValueError):
        Uniform(1.0, 0.0)


def test_user_defined_density():
    dist = UserDefined(lambda x: -0.5 * x @ x, geometry=2, name="v")
    assert dist.logpdf([1.0, 1.0]) == pytest.approx(-1.0)
    assert not dist.has_gradient
    with pytest.raises(CapabilityError):
        dist.gradient([0.0, 0.0])
    with pytest.raises(CapabilityError):
        dist.sample(1)
    with_gradient = UserDefined(lambda x: -0.5 * x @ x, gradient_func=lambda x: -x, geometry=2)
    np.testing.assert_allclose(with_gradient.gradient([1.0, -2.0]), [-1.0, 2.0])


def test_functional_entry_points(rng):
    prior = Gaussian(np.zeros(3), prec=Deferred.identity("d"), name="x")
    bound = condition(prior, {"d": 4.0})
    value = rng.standard_normal(3)
    assert logpdf(bound, value) == pytest.approx(stats.multivariate_normal(np.zeros(3), np.eye(3) / 4.0).logpdf(value))
    np.testing.assert_allclose(grad_logpdf(bound, value), -4.0 * value)
    samples = sample_direct(bound, 5, 10)
    assert samples.draws.shape == (10, 3)
    np.testing.assert_array_equal(samples.draws, sample_direct(bound, 5, 10).draws)
