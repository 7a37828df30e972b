import copy

import numpy as np

from samples.samples import Samples
from utilities.deferred import Deferred, free_variables, resolve
from utilities.errors import CapabilityError, ConditioningError, DimensionError
from utilities.geometry import Geometry, default_geometry
from utilities.rng import as_generator


class Distribution:
    """
    A named probability density whose parameters may be deferred functions of other variables.

    Subclasses list their parameter names in `parameter_names` and implement `_logpdf`, and
    optionally `_gradient` and `_sample`, working on fully resolved parameters.
    """

    family = "Distribution"
    parameter_names = ()
    is_gaussian = False

    def __init__(self, name=None, geometry=None, **params):
        self.name = name
        self._params = {key: value for key, value in params.items()}
        if geometry is not None and not isinstance(geometry, Geometry):
            geometry = default_geometry(int(geometry))
        self._geometry = geometry

    # ---------------------------------------------------------------- parameters

    @property
    def parameters(self):
        return dict(self._params)

    def parameter(self, key):
        """Raw parameter value, possibly a Deferred."""
        return self._params.get(key)

    def value_of(self, key):
        """Resolved parameter value; fails while the parameter is still deferred."""
        value = self._params.get(key)
        if isinstance(value, Deferred):
            raise ConditioningError(
                f"{self.describe()} parameter '{key}' depends on unresolved variables {list(value.free_variables)}")
        return value

    @property
    def conditioning_variables(self):
        names = []
        for value in self._params.values():
            for name in free_variables(value):
                if name not in names:
                    names.append(name)
        return names

    @property
    def is_fully_specified(self):
        return not self.conditioning_variables

    # ---------------------------------------------------------------- geometry

    @property
    def geometry(self):
        if self._geometry is None:
            self._geometry = self._infer_geometry()
        return self._geometry

    @property
    def dim(self):
        geometry = self.geometry
        if geometry is None:
            raise ConditioningError(f"{self.describe()} has no known dimension until it is conditioned")
        return geometry.par_dim

    def _infer_geometry(self):
        for key in self.parameter_names:
            value = self._params.get(key)
            if value is None or isinstance(value, Deferred):
                continue
            value = np.asarray(value)
            if value.ndim >= 1:
                return default_geometry(value.shape[0])
        if self.is_fully_specified:
            # Only scalar parameters: a univariate density
            return default_geometry(1)
        return None

    # ---------------------------------------------------------------- conditioning

    def condition(self, bindings=None, **kwargs):
        """
        Fix some conditioning variables.

        :param {dict} bindings: name -> value, every name must be a conditioning variable
        :return: {Distribution} new distribution; unbound conditioning variables are kept
        """
        bindings = dict(bindings or {}, **kwargs)
        if not bindings:
            return self
        unknown = [name for name in bindings if name not in self.conditioning_variables]
        if unknown:
            raise ConditioningError(
                f"Cannot condition {self.describe()} on {unknown}; valid names are {self.conditioning_variables}")
        return self.bind_from(bindings)

    def bind_from(self, assignment):
        """Like `condition`, but silently ignores names this distribution does not depend on."""
        relevant = {name: value for name, value in assignment.items() if name in self.conditioning_variables}
        if not relevant:
            return self
        conditioned = copy.copy(self)
        conditioned._params = {key: resolve(value, relevant) for key, value in self._params.items()}
        if self._geometry is None:
            conditioned._geometry = None
        conditioned._after_condition()
        return conditioned

    def _after_condition(self):
        pass

    def with_geometry(self, geometry):
        """Copy with an explicit geometry, for densities whose size is only known from data."""
        copied = copy.copy(self)
        copied._geometry = geometry if isinstance(geometry, Geometry) else default_geometry(int(geometry))
        copied._after_condition()
        return copied

    def __call__(self, **bindings):
        return self.condition(bindings)

    # ---------------------------------------------------------------- evaluation

    def logpdf(self, x):
        """
        Log density at x, up to parameter-independent constants where stated by the family.

        Points outside the support give -inf.
        """
        self._require_specified("logpdf")
        return float(self._logpdf(self._check_point(x)))

    def pdf(self, x):
        return float(np.exp(self.logpdf(x)))

    def gradient(self, x):
        """Gradient of the log density at x."""
        self._require_specified("gradient")
        return np.asarray(self._gradient(self._check_point(x)), dtype=float)

    def grad_logpdf(self, x):
        return self.gradient(x)

    @property
    def has_gradient(self):
        return type(self)._gradient is not Distribution._gradient

    def sample(self, N=1, rng=None):
        """
        Independent draws.

        :param {int} N: Number of draws
        :param rng: Seed or numpy Generator; the caller owns the stream
        :return: {Samples}
        """
        self._require_specified("sample")
        rng = as_generator(rng)
        draws = np.array([np.atleast_1d(self._sample(rng)) for _ in range(int(N))], dtype=float)
        return Samples(draws.reshape(int(N), self.dim), self.geometry, name=self.name,
                       provenance={"sampler": "direct", "family": self.family})

    def sample_direct(self, rng, N):
        return self.sample(N, rng)

    def initial_value(self):
        """A point inside the support, used as the default chain start."""
        return np.zeros(self.dim)

    def _logpdf(self, x):
        raise NotImplementedError

    def _gradient(self, x):
        raise CapabilityError(f"{self.family} has no gradient of its log density")

    def _sample(self, rng):
        raise CapabilityError(f"{self.family} cannot be sampled directly; use an MCMC sampler")

    # ---------------------------------------------------------------- helpers

    def _require_specified(self, operation):
        if not self.is_fully_specified:
            raise ConditioningError(
                f"{operation} needs a fully specified distribution; {self.describe()} still depends on "
                f"{self.conditioning_variables}")

    def _check_point(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise DimensionError(f"{self.describe()} point", (self.dim,), x.shape)
        return x

    def describe(self):
        return f"{self.family}({self.name})" if self.name else self.family

    def __str__(self):
        if self.conditioning_variables:
            return f"{self.family}. Conditioning variables {self.conditioning_variables}."
        return f"{self.family}."

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r}, conditioning={self.conditioning_variables})"


def logpdf(dist, x):
    return dist.logpdf(x)


def grad_logpdf(dist, x):
    return dist.gradient(x)


def sample_direct(dist, rng, N):
    return dist.sample(N, rng)


def condition(dist, bindings):
    return dist.condition(bindings)
