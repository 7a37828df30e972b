import numpy as np

from distributions.distribution import Distribution
from utilities.errors import CapabilityError


class UserDefined(Distribution):
    """
    A density given by user functions.

    :param {callable} logpdf_func: x -> log density
    :param {callable} gradient_func: Optional x -> gradient of the log density
    :param {callable} sample_func: Optional rng -> one draw
    """

    family = "UserDefined"

    def __init__(self, logpdf_func, gradient_func=None, sample_func=None, geometry=1, name=None,
                 initial_point=None):
        super().__init__(name=name, geometry=geometry)
        self._logpdf_func = logpdf_func
        self._gradient_func = gradient_func
        self._sample_func = sample_func
        self._initial_point = initial_point

    @property
    def has_gradient(self):
        return self._gradient_func is not None

    def _logpdf(self, x):
        value = float(self._logpdf_func(x))
        return -np.inf if np.isnan(value) else value

    def _gradient(self, x):
        if self._gradient_func is None:
            raise CapabilityError(f"{self.describe()} was declared without a gradient")
        return self._gradient_func(x)

    def _sample(self, rng):
        if self._sample_func is None:
            raise CapabilityError(f"{self.describe()} was declared without a sampler; use an MCMC sampler")
        return self._sample_func(rng)

    def initial_value(self):
        if self._initial_point is None:
            return super().initial_value()
        return np.asarray(self._initial_point, dtype=float)
