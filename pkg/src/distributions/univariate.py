# Elementwise densities: each coordinate is an independent draw from the same family.

import numpy as np
from scipy.special import gammaln

from distributions.distribution import Distribution
from utilities.errors import DomainError

LOG_2PI = np.log(2.0 * np.pi)


class Gamma(Distribution):
    """
    Gamma(shape, rate), density rate^shape x^(shape-1) exp(-rate x) / Gamma(shape) on x > 0.

    The mean is shape / rate; Gamma(1, 1e-4) is the weakly informative default for a precision.
    """

    family = "Gamma"
    parameter_names = ("shape", "rate")

    def __init__(self, shape=1.0, rate=1.0, name=None, geometry=None):
        super().__init__(name=name, geometry=geometry, shape=shape, rate=rate)
        if self.is_fully_specified:
            self._check_parameters()

    def _after_condition(self):
        if self.is_fully_specified:
            self._check_parameters()

    def _check_parameters(self):
        if np.any(np.asarray(self.value_of("shape")) <= 0) or np.any(np.asarray(self.value_of("rate")) <= 0):
            raise ValueError(f"Gamma shape and rate must be positive, got {self.value_of('shape')}, "
                             f"{self.value_of('rate')}")

    @property
    def shape(self):
        return self.value_of("shape")

    @property
    def rate(self):
        return self.value_of("rate")

    def _logpdf(self, x):
        if np.any(x <= 0):
            return -np.inf
        shape, rate = self.shape, self.rate
        return float(np.sum(shape * np.log(rate) - gammaln(shape) + (shape - 1.0) * np.log(x) - rate * x))

    def _gradient(self, x):
        if np.any(x <= 0):
            raise DomainError(f"Gamma gradient is undefined at x <= 0, got {x}")
        return (self.shape - 1.0) / x - self.rate

    def _sample(self, rng):
        # numpy parameterizes by scale = 1 / rate
        return rng.gamma(self.shape, 1.0 / np.asarray(self.rate, dtype=float), size=self.dim)

    def initial_value(self):
        return np.broadcast_to(np.asarray(self.shape / np.asarray(self.rate), dtype=float), (self.dim,)).copy()


class Lognormal(Distribution):
    """exp of Gaussian(mean, var), on x > 0."""

    family = "Lognormal"
    parameter_names = ("mean", "var")

    def __init__(self, mean=0.0, var=1.0, name=None, geometry=None):
        super().__init__(name=name, geometry=geometry, mean=mean, var=var)

    def _logpdf(self, x):
        if np.any(x <= 0):
            return -np.inf
        mean, var = self.value_of("mean"), self.value_of("var")
        log_x = np.log(x)
        return float(np.sum(-0.5 * (log_x - mean) ** 2 / var - log_x - 0.5 * np.log(var) - 0.5 * LOG_2PI))

    def _gradient(self, x):
        if np.any(x <= 0):
            raise DomainError(f"Lognormal gradient is undefined at x <= 0, got {x}")
        mean, var = self.value_of("mean"), self.value_of("var")
        return -(1.0 + (np.log(x) - mean) / var) / x

    def _sample(self, rng):
        mean, var = self.value_of("mean"), self.value_of("var")
        return np.exp(mean + np.sqrt(var) * rng.standard_normal(self.dim))

    def initial_value(self):
        return np.broadcast_to(np.exp(np.asarray(self.value_of("mean"), dtype=float)), (self.dim,)).copy()


class Uniform(Distribution):
    family = "Uniform"
    parameter_names = ("low", "high")

    def __init__(self, low=0.0, high=1.0, name=None, geometry=None):
        super().__init__(name=name, geometry=geometry, low=low, high=high)
        if self.is_fully_specified and np.any(np.asarray(low) >= np.asarray(high)):
            raise ValueError(f"Uniform needs low < high, got {low}, {high}")

    def _bounds(self):
        low = np.broadcast_to(np.asarray(self.value_of("low"), dtype=float), (self.dim,))
        high = np.broadcast_to(np.asarray(self.value_of("high"), dtype=float), (self.dim,))
        return low, high

    def _logpdf(self, x):
        low, high = self._bounds()
        if np.any(x < low) or np.any(x > high):
            return -np.inf
        return float(-np.sum(np.log(high - low)))

    def _sample(self, rng):
        low, high = self._bounds()
        return rng.uniform(low, high)

    def initial_value(self):
        low, high = self._bounds()
        return 0.5 * (low + high)
