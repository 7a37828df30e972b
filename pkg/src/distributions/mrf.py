# Markov random field priors on signals (dims=1) and column-stacked square images (dims=2).
#
# All three use zero boundary conditions. GMRF penalizes squared first-order differences,
# LMRF their absolute values and CMRF their Cauchy log-likelihood.

from functools import lru_cache

import numpy as np

from distributions.distribution import Distribution
from utilities.errors import DomainError
from utilities.geometry import Continuous2D, Image2D, default_geometry
from utilities.linalg import (StackedOperator, banded_cholesky, difference_matrix, difference_operators_2d,
                              gmrf_precision, image_side)

LOG_2PI = np.log(2.0 * np.pi)


@lru_cache(maxsize=16)
def _difference_blocks(n, dims):
    if dims == 1:
        return (difference_matrix(n),)
    return difference_operators_2d(image_side(n))


@lru_cache(maxsize=16)
def _unit_precision_factor(n, dims):
    return banded_cholesky(gmrf_precision(n, 1.0, dims))


@lru_cache(maxsize=16)
def _unit_precision_logdet(n, dims):
    """log det of the d = 1 precision, from the closed-form eigenvalues of L_N."""
    if dims == 1:
        return float(np.log(n + 1.0))
    side = image_side(n)
    eigenvalues = 2.0 - 2.0 * np.cos(np.arange(1, side + 1) * np.pi / (side + 1))
    return float(np.sum(np.log(np.add.outer(eigenvalues, eigenvalues))))


class MarkovRandomField(Distribution):
    """Shared structure: location vector, one positive scalar parameter and the field dimension."""

    strength_parameter = None
    parameter_names = ("location",)

    def __init__(self, location, strength, dims=None, name=None, geometry=None):
        if geometry is None and np.ndim(location) == 0 and not hasattr(location, "bind"):
            raise ValueError(f"{self.family} needs a geometry or a location vector to know its size")
        super().__init__(name=name, geometry=geometry, location=location, **{self.strength_parameter: strength})
        if dims is None:
            dims = 2 if isinstance(self.geometry, (Image2D, Continuous2D)) else 1
        if dims not in (1, 2):
            raise ValueError(f"dims must be 1 or 2, got {dims}")
        self.dims = dims
        if self.is_fully_specified:
            self._check_strength()

    def _after_condition(self):
        if self.is_fully_specified:
            self._check_strength()

    def _check_strength(self):
        if self.strength <= 0:
            raise ValueError(f"{self.family} {self.strength_parameter} must be positive, got {self.strength}")

    @property
    def strength(self):
        return float(self.value_of(self.strength_parameter))

    def location_vector(self):
        return np.broadcast_to(np.asarray(self.value_of("location"), dtype=float), (self.dim,)).copy()

    def difference_blocks(self):
        """The difference operators whose outputs the density penalizes."""
        return _difference_blocks(self.dim, self.dims)

    @property
    def n_difference_terms(self):
        """Number of first-order differences: n+1 for signals, 2N(N+1) for N x N images."""
        return sum(block.rows for block in self.difference_blocks())

    def initial_value(self):
        return self.location_vector()

    def _infer_geometry(self):
        location = self.parameter("location")
        if np.ndim(location) == 1 and not hasattr(location, "bind"):
            return default_geometry(len(location))
        return None


class GMRF(MarkovRandomField):
    """
    Gaussian Markov random field with precision d * L (1D) or d * (I kron L + L kron I) (2D).

    logpdf = -d/2 r^T L r + n/2 log d + 1/2 log det L - n/2 log 2 pi, r = x - mean.
    """

    family = "GMRF"
    strength_parameter = "prec"
    is_gaussian = True

    def __init__(self, mean=0.0, prec=1.0, dims=None, name=None, geometry=None):
        super().__init__(mean, prec, dims=dims, name=name, geometry=geometry)

    @property
    def mean(self):
        return self.parameter("location")

    def mean_vector(self):
        return self.location_vector()

    def structure_operator(self):
        """The d = 1 precision matrix L."""
        return gmrf_precision(self.dim, 1.0, self.dims)

    def quadratic_form(self, x):
        """r^T L r for r = x - mean."""
        residual = np.asarray(x, dtype=float) - self.location_vector()
        return float(residual @ self.structure_operator().apply(residual))

    def precision_apply(self, v):
        return self.strength * self.structure_operator().apply(v)

    def sqrt_precision(self):
        """sqrt(d) D (1D) or sqrt(d) [I kron D; D kron I] (2D), whose Gram matrix is the precision."""
        blocks = self.difference_blocks()
        operator = blocks[0] if len(blocks) == 1 else StackedOperator(blocks)
        return operator.scaled(np.sqrt(self.strength))

    def _logpdf(self, x):
        d, n = self.strength, self.dim
        return (-0.5 * d * self.quadratic_form(x) + 0.5 * n * np.log(d)
                + 0.5 * _unit_precision_logdet(n, self.dims) - 0.5 * n * LOG_2PI)

    def _gradient(self, x):
        return -self.precision_apply(x - self.location_vector())

    def _sample(self, rng):
        # U^T U = L, so x = mean + U^-1 z / sqrt(d) has covariance (d L)^-1
        factor = _unit_precision_factor(self.dim, self.dims)
        z = rng.standard_normal(self.dim)
        return self.location_vector() + factor.solve_upper(z) / np.sqrt(self.strength)


class LMRF(MarkovRandomField):
    """
    Laplace Markov random field, density proportional to exp(-T(x)/b) / (2b)^m.

    T is ||D r||_1 for signals and the mean of the horizontal and vertical l1 norms for images; m is
    the number of difference terms. There is no gradient and no direct sampler.
    """

    family = "LMRF"
    strength_parameter = "scale"

    def __init__(self, location=0.0, scale=1.0, dims=None, name=None, geometry=None):
        super().__init__(location, scale, dims=dims, name=name, geometry=geometry)

    def block_weights(self):
        return (1.0,) if self.dims == 1 else (0.5, 0.5)

    def total_variation(self, x):
        """T(x - location), the weighted l1 norm of the differences."""
        residual = np.asarray(x, dtype=float) - self.location_vector()
        return float(sum(weight * np.sum(np.abs(block.apply(residual)))
                         for weight, block in zip(self.block_weights(), self.difference_blocks())))

    def _logpdf(self, x):
        b = self.strength
        return -self.total_variation(x) / b - self.n_difference_terms * np.log(2.0 * b)


class CMRF(MarkovRandomField):
    """
    Cauchy Markov random field, density proportional to prod b / (b^2 + delta^2) over all differences.

    The constant pi per factor is dropped, so the log density of a constant zero field with b = 1 is 0.
    """

    family = "CMRF"
    strength_parameter = "scale"

    def __init__(self, location=0.0, scale=1.0, dims=None, name=None, geometry=None):
        super().__init__(location, scale, dims=dims, name=name, geometry=geometry)

    def _differences(self, x):
        residual = np.asarray(x, dtype=float) - self.location_vector()
        return [block.apply(residual) for block in self.difference_blocks()]

    def _logpdf(self, x):
        b = self.strength
        return float(sum(np.sum(np.log(b) - np.log(b ** 2 + delta ** 2)) for delta in self._differences(x)))

    def _gradient(self, x):
        b = self.strength
        gradient = np.zeros(self.dim)
        for block, delta in zip(self.difference_blocks(), self._differences(x)):
            gradient -= block.apply_transpose(2.0 * delta / (b ** 2 + delta ** 2))
        if not np.all(np.isfinite(gradient)):
            raise DomainError("CMRF gradient is not finite")
        return gradient
