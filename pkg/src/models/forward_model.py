import numpy as np

from utilities.deferred import Deferred
from utilities.errors import CapabilityError, DimensionError
from utilities.geometry import Geometry, default_geometry
from utilities.linalg import IdentityOperator, as_operator, load_matrix_csv


class ForwardModel:
    """A map A from parameter space (domain) to data space (range), y = A(x)."""

    kind = "nonlinear"

    def __init__(self, forward, domain_geometry, range_geometry, jacobian=None, name="A"):
        """
        :param {callable} forward: Function mapping a domain vector to a range vector
        :param {Geometry|int} domain_geometry: Geometry (or dimension) of the parameters
        :param {Geometry|int} range_geometry: Geometry (or dimension) of the data
        :param {callable} jacobian: Optional function returning the range x domain Jacobian at a point
        :param {str} name: Name used in printed equations
        """
        self._forward = forward
        self._jacobian = jacobian
        self.domain_geometry = _as_geometry(domain_geometry)
        self.range_geometry = _as_geometry(range_geometry)
        self.name = name

    @property
    def domain_dim(self):
        return self.domain_geometry.par_dim

    @property
    def range_dim(self):
        return self.range_geometry.par_dim

    @property
    def has_jacobian(self):
        return self._jacobian is not None

    def forward(self, x):
        x = self._check_domain(x)
        y = np.asarray(self._forward(x), dtype=float)
        if y.shape != (self.range_dim,):
            raise DimensionError(f"{self.name} forward output", (self.range_dim,), y.shape)
        return y

    def apply_forward(self, x):
        return self.forward(x)

    def __call__(self, x):
        return self.forward(x)

    def __matmul__(self, x):
        return self.forward(x)

    def adjoint(self, y):
        raise CapabilityError(f"Model '{self.name}' is nonlinear and has no adjoint")

    def jacobian(self, x):
        """
        Matrix of partial derivatives dA_i/dx_j at x.

        :param {np.ndarray} x: Domain point
        :return: {np.ndarray} range_dim x domain_dim matrix
        """
        if self._jacobian is None:
            raise CapabilityError(f"Model '{self.name}' has no Jacobian; gradient-based methods cannot use it")
        x = self._check_domain(x)
        return np.atleast_2d(np.asarray(self._jacobian(x), dtype=float))

    def gradient(self, direction, x):
        """Vector-Jacobian product J(x)^T direction."""
        return self.jacobian(x).T @ direction

    def of(self, variable):
        """Deferred value A(variable), used as a distribution parameter (e.g. a data mean)."""
        return ModelOutput(self, variable)

    def _check_domain(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 and self.domain_dim == 1:
            x = x.reshape(1)
        if x.shape != (self.domain_dim,):
            raise DimensionError(f"{self.name} input", (self.domain_dim,), x.shape)
        return x

    def __repr__(self):
        return (f"{type(self).__name__}(kind={self.kind}, domain={self.domain_geometry!r}, "
                f"range={self.range_geometry!r})")


class LinearModel(ForwardModel):
    """y = A x for a MatrixOperator A; carries the adjoint x = A^T y."""

    kind = "linear"

    def __init__(self, operator, domain_geometry=None, range_geometry=None, name="A"):
        self.operator = as_operator(operator)
        domain_geometry = self.operator.cols if domain_geometry is None else domain_geometry
        range_geometry = self.operator.rows if range_geometry is None else range_geometry
        super().__init__(self.operator.apply, domain_geometry, range_geometry, name=name)
        if self.domain_dim != self.operator.cols or self.range_dim != self.operator.rows:
            raise DimensionError(f"{name} geometries", self.operator.shape, (self.range_dim, self.domain_dim))
        self._matrix = None

    @classmethod
    def identity(cls, n, geometry=None):
        return cls(IdentityOperator(n), geometry, geometry)

    @classmethod
    def from_csv(cls, path, name="A"):
        """Load a dense linear model from a header-free CSV matrix (rows = range dimension)."""
        return cls(load_matrix_csv(path), name=name)

    @property
    def has_jacobian(self):
        return True

    @property
    def T(self):
        return self.operator.T

    def adjoint(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.range_dim,):
            raise DimensionError(f"{self.name} adjoint input", (self.range_dim,), y.shape)
        return self.operator.apply_transpose(y)

    def apply_adjoint(self, y):
        return self.adjoint(y)

    def jacobian(self, x):
        self._check_domain(x)
        return self.to_dense()

    def gradient(self, direction, x):
        return self.adjoint(direction)

    def to_dense(self):
        if self._matrix is None:
            self._matrix = self.operator.to_dense()
        return self._matrix

    def as_nonlinear(self):
        """The same map exposed as a generic model with a constant Jacobian."""
        return ForwardModel(self.operator.apply, self.domain_geometry, self.range_geometry,
                            jacobian=lambda x: self.to_dense(), name=self.name)


class ModelOutput(Deferred):
    """Deferred parameter value model(variable)."""

    def __init__(self, model, variable, bound=None):
        super().__init__(model.forward, (variable,), tag="model", bound=bound)
        self.model = model

    def _rebound(self, bound):
        return ModelOutput(self.model, self.depends_on[0], bound)

    def __repr__(self):
        return f"{self.model.name}({self.depends_on[0]})"


def apply_forward(model, x):
    return model.forward(x)


def apply_adjoint(model, y):
    return model.adjoint(y)


def jacobian(model, x):
    return model.jacobian(x)


def _as_geometry(geometry):
    if isinstance(geometry, Geometry):
        return geometry
    return default_geometry(int(geometry))
