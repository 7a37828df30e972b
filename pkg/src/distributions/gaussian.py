import numpy as np

from distributions.distribution import Distribution
from utilities.deferred import Deferred
from utilities.errors import ConditioningError, DimensionError
from utilities.geometry import default_geometry
from utilities.linalg import DenseOperator, IdentityOperator, cholesky_factor

LOG_2PI = np.log(2.0 * np.pi)
PARAMETERIZATIONS = ("cov", "prec", "sqrtcov", "sqrtprec")


class GaussianPrecision:
    """
    Resolved covariance structure of a Gaussian, stored through its precision.

    Scalars mean isotropic (value * I), vectors diagonal, matrices full.
    """

    def __init__(self, kind, value, dim):
        value = np.asarray(value, dtype=float)
        self.dim = dim
        if value.ndim <= 1:
            if value.ndim == 1 and value.shape != (dim,):
                raise DimensionError(f"Gaussian {kind}", (dim,), value.shape)
            self.diagonal = True
            self.precision_diagonal = np.broadcast_to(self._diagonal_precision(kind, value), (dim,)).copy()
            if np.any(self.precision_diagonal <= 0) or not np.all(np.isfinite(self.precision_diagonal)):
                raise ValueError(f"Gaussian {kind} must be positive and finite")
            self.isotropic = value.ndim == 0
            return
        if value.shape != (dim, dim):
            raise DimensionError(f"Gaussian {kind}", (dim, dim), value.shape)
        self.diagonal = False
        self.isotropic = False
        if kind == "cov":
            self._cov_factor = cholesky_factor(value)
            self._prec_factor = None
        elif kind == "sqrtcov":
            self._cov_factor = cholesky_factor(value @ value.T)
            self._prec_factor = None
        elif kind == "prec":
            self._cov_factor = None
            self._matrix = value.copy()
            self._prec_factor = cholesky_factor(self._matrix)
        else:
            self._cov_factor = None
            self._matrix = value.T @ value
            self._prec_factor = cholesky_factor(self._matrix)

    @staticmethod
    def _diagonal_precision(kind, value):
        if kind == "cov":
            return 1.0 / value
        if kind == "sqrtcov":
            return 1.0 / value ** 2
        if kind == "prec":
            return value
        return value ** 2

    def apply(self, v):
        """Q v"""
        if self.diagonal:
            return self.precision_diagonal * v
        if self._prec_factor is not None:
            return self._matrix @ v
        return self._cov_factor.solve(v)

    def logdet(self):
        """log det Q"""
        if self.diagonal:
            return float(np.sum(np.log(self.precision_diagonal)))
        if self._prec_factor is not None:
            return self._prec_factor.logdet()
        return -self._cov_factor.logdet()

    def draw_noise(self, rng):
        """A draw from N(0, Q^-1)."""
        z = rng.standard_normal(self.dim)
        if self.diagonal:
            return z / np.sqrt(self.precision_diagonal)
        if self._prec_factor is not None:
            return self._prec_factor.solve_transpose(z)
        return self._cov_factor.lower @ z

    def sqrt_operator(self):
        """Operator C with C^T C = Q."""
        if self.diagonal:
            return IdentityOperator(self.dim).scaled(np.sqrt(self.precision_diagonal))
        if self._prec_factor is not None:
            return DenseOperator(self._prec_factor.lower.T)
        inverse_lower = np.linalg.inv(self._cov_factor.lower)
        return DenseOperator(inverse_lower)

    def to_dense(self):
        if self.diagonal:
            return np.diag(self.precision_diagonal)
        if self._prec_factor is not None:
            return self._matrix.copy()
        return self._cov_factor.solve(np.eye(self.dim))


class Gaussian(Distribution):
    """
    Multivariate normal N(mean, cov).

    Exactly one of cov, prec, sqrtcov, sqrtprec may be given; the default is cov=1. Each may be a
    scalar (isotropic), a vector (diagonal) or a matrix, or a Deferred producing one of those.
    `mean` may be a Deferred such as `model.of("x")`, which is how data distributions are declared.
    """

    family = "Gaussian"
    parameter_names = ("mean", "cov", "prec", "sqrtcov", "sqrtprec")
    is_gaussian = True

    def __init__(self, mean=0.0, cov=None, prec=None, sqrtcov=None, sqrtprec=None, name=None, geometry=None):
        given = {key: value for key, value in zip(PARAMETERIZATIONS, (cov, prec, sqrtcov, sqrtprec))
                 if value is not None}
        if len(given) > 1:
            raise ValueError(f"Gaussian takes one of {list(PARAMETERIZATIONS)}, got {list(given)}")
        self.parameterization, covariance = next(iter(given.items()), ("cov", 1.0))
        params = {"mean": mean, self.parameterization: covariance}
        if geometry is None and hasattr(mean, "model"):
            geometry = mean.model.range_geometry
        super().__init__(name=name, geometry=geometry, **params)
        self._precision = None

    def _after_condition(self):
        self._precision = None

    @property
    def mean(self):
        return self.parameter("mean")

    @property
    def covariance_parameter(self):
        return self.parameter(self.parameterization)

    def mean_vector(self):
        return np.broadcast_to(np.asarray(self.value_of("mean"), dtype=float), (self.dim,)).copy()

    @property
    def precision(self):
        if self._precision is None:
            self._precision = GaussianPrecision(self.parameterization, self.value_of(self.parameterization), self.dim)
        return self._precision

    def precision_apply(self, v):
        return self.precision.apply(v)

    def sqrt_precision(self):
        return self.precision.sqrt_operator()

    def _infer_geometry(self):
        mean = self.parameter("mean")
        if hasattr(mean, "model"):
            return mean.model.range_geometry
        return super()._infer_geometry()

    def _logpdf(self, x):
        residual = x - self.mean_vector()
        return (-0.5 * residual @ self.precision.apply(residual) + 0.5 * self.precision.logdet()
                - 0.5 * self.dim * LOG_2PI)

    def _gradient(self, x):
        return -self.precision.apply(x - self.mean_vector())

    def gradient_wrt_mean(self, x):
        """d logpdf / d mean = Q (x - mean)."""
        self._require_specified("gradient_wrt_mean")
        return self.precision.apply(self._check_point(x) - self.mean_vector())

    def _sample(self, rng):
        return self.mean_vector() + self.precision.draw_noise(rng)

    def initial_value(self):
        if isinstance(self.parameter("mean"), Deferred):
            return np.zeros(self.dim)
        return self.mean_vector()


def isotropic_precision(gaussian):
    """Scalar precision of an isotropic Gaussian; errors for other covariance structures."""
    if not gaussian.precision.isotropic:
        raise ConditioningError(f"{gaussian.describe()} is not isotropic")
    return float(gaussian.precision.precision_diagonal[0])


def dense_covariance(gaussian):
    """Materialized covariance matrix, for small dimensions."""
    return np.linalg.inv(gaussian.precision.to_dense())


def standard_normal(dim, name=None):
    return Gaussian(np.zeros(dim), 1.0, name=name, geometry=default_geometry(dim))
