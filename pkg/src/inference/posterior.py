import numpy as np

from utilities.deferred import Deferred
from utilities.errors import CapabilityError, ConditioningError, DimensionError


class Posterior:
    """
    A joint distribution with some variables observed; the sampling target.

    The log density is the sum of the component log densities with the data substituted, which is
    the log posterior up to an additive constant. Components that only depend on observed values
    are constant and left out. Points are either dicts (name -> value) or flat vectors with the
    target variables concatenated in `targets` order.
    """

    def __init__(self, joint, data):
        self.joint = joint
        self.data = {name: _as_value(value) for name, value in data.items()}
        self.targets = [name for name in joint.variables if name not in self.data]
        if not self.targets:
            raise ConditioningError("Every variable is observed; there is nothing left to infer")
        active = set(self.targets)
        for name in self.targets:
            active.update(joint.dependents(name))
        self.active = [name for name in joint.variables if name in active]
        self._dims = {name: self._target_dim(name) for name in self.targets}
        self._offsets = np.cumsum([0] + [self._dims[name] for name in self.targets])

    # ---------------------------------------------------------------- layout

    def _target_dim(self, name):
        dist = self.joint[name].bind_from(self.data)
        if dist.geometry is None:
            raise ConditioningError(f"The size of '{name}' cannot be determined; give its distribution a geometry")
        return dist.dim

    @property
    def dim(self):
        return int(self._offsets[-1])

    def dim_of(self, name):
        return self._dims[name]

    def geometry(self, name):
        return self.joint[name].bind_from(self.data).geometry

    def flatten(self, assignment):
        parts = []
        for name in self.targets:
            if name not in assignment:
                raise ConditioningError(f"Point is missing target variable '{name}'")
            value = np.atleast_1d(np.asarray(assignment[name], dtype=float))
            if value.shape != (self._dims[name],):
                raise DimensionError(f"value of '{name}'", (self._dims[name],), value.shape)
            parts.append(value)
        return np.concatenate(parts)

    def unflatten(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise DimensionError("posterior point", (self.dim,), x.shape)
        assignment = {}
        for i, name in enumerate(self.targets):
            block = x[self._offsets[i]:self._offsets[i + 1]]
            # Scalars are handed to deferred parameters as plain floats
            assignment[name] = float(block[0]) if self._dims[name] == 1 else block
        return assignment

    def split(self, draws):
        """Split an N x dim array of flat points into per-variable arrays."""
        return {name: draws[:, self._offsets[i]:self._offsets[i + 1]] for i, name in enumerate(self.targets)}

    def _values(self, x):
        assignment = x if isinstance(x, dict) else self.unflatten(x)
        missing = [name for name in self.targets if name not in assignment]
        if missing:
            raise ConditioningError(f"Point is missing target variables {missing}")
        return self.joint.resolve({**self.data, **{name: _as_value(assignment[name]) for name in self.targets}})

    # ---------------------------------------------------------------- densities

    def _sum(self, values, names):
        total = 0.0
        for name in names:
            total += self.joint[name].bind_from(values).logpdf(values[name])
            if total == -np.inf:
                break
        return float(total)

    def logpdf(self, x):
        return self._sum(self._values(x), self.active)

    def log_likelihood(self, x):
        """The part of the log density coming from observed (or fixed) variables."""
        return self._sum(self._values(x), self.likelihood_terms())

    def log_prior(self, x):
        return self._sum(self._values(x), self.targets)

    def likelihood_terms(self):
        return [name for name in self.active if name not in self.targets]

    def gradient(self, x):
        return self._gradient(self._values(x), self.active)

    def gradient_log_likelihood(self, x):
        return self._gradient(self._values(x), self.likelihood_terms())

    def _gradient(self, values, names):
        grads = {name: np.zeros(np.size(values[name])) for name in self.targets}
        grads.update({name: np.zeros(np.size(values[name])) for name in self.joint.deterministic})
        for name in names:
            raw = self.joint[name]
            dist = raw.bind_from(values)
            if name in self.targets:
                grads[name] += dist.gradient(values[name])
            for key, param in raw.parameters.items():
                if not isinstance(param, Deferred) or not self._reaches_target(param):
                    continue
                source, contribution = self._parameter_gradient(name, key, param, dist, values)
                grads[source] += contribution
        for node_name in reversed(self.joint.deterministic_order):
            node = self.joint.deterministic[node_name]
            if not np.any(grads[node_name]):
                continue
            pulled = node.pullback(grads[node_name], values)
            if pulled is None:
                raise CapabilityError(f"Deterministic node '{node_name}' has no vector-Jacobian product")
            for parent, contribution in pulled.items():
                if parent in grads:
                    grads[parent] += contribution
        return np.concatenate([np.atleast_1d(grads[name]) for name in self.targets])

    def _parameter_gradient(self, name, key, param, dist, values):
        if key != "mean" or not getattr(dist, "is_gaussian", False) or param.tag not in ("identity", "model"):
            raise CapabilityError(
                f"Gradient through parameter '{key}' of '{name}' ({dist.family}) is not available")
        g_mean = dist.gradient_wrt_mean(values[name])
        source = param.variable
        if param.tag == "identity":
            return source, g_mean
        return source, param.model.gradient(g_mean, values[source])

    def _reaches_target(self, param):
        frontier = list(param.depends_on)
        while frontier:
            name = frontier.pop()
            if name in self.targets:
                return True
            if name in self.joint.deterministic:
                frontier.extend(self.joint.deterministic[name].depends_on)
        return False

    @property
    def has_gradient(self):
        """Structural check that `gradient` can be evaluated everywhere in the support."""
        for name in self.active:
            raw = self.joint[name]
            if name in self.targets and not raw.has_gradient:
                return False
            for key, param in raw.parameters.items():
                if not isinstance(param, Deferred) or not self._reaches_target(param):
                    continue
                if key != "mean" or not raw.is_gaussian or param.tag not in ("identity", "model"):
                    return False
                if param.tag == "model" and not param.model.has_jacobian:
                    return False
                if any(dep in self.joint.deterministic and not self._has_vjp_path(dep) for dep in param.depends_on):
                    return False
        return True

    def _has_vjp_path(self, name):
        node = self.joint.deterministic[name]
        if node.vjp is None:
            return False
        return all(self._has_vjp_path(parent) for parent in node.depends_on if parent in self.joint.deterministic)

    # ---------------------------------------------------------------- conditionals

    def conditional(self, name, point):
        """
        The posterior of one target with every other target fixed at `point`.

        :param {str} name: Target variable to keep free
        :param point: Current values of all targets (dict or flat vector)
        :return: {Posterior}
        """
        if name not in self.targets:
            raise ConditioningError(f"'{name}' is not a target; targets are {self.targets}")
        assignment = point if isinstance(point, dict) else self.unflatten(point)
        fixed = {other: assignment[other] for other in self.targets if other != name}
        return Posterior(self.joint, {**self.data, **fixed})

    def fix(self, others):
        """Posterior with the given targets fixed at known values."""
        return Posterior(self.joint, {**self.data, **others})

    def prior(self, name):
        """The density of a target with every known value substituted."""
        return self.joint[name].bind_from(self.data)

    def initial_point(self):
        """Flat starting point from each target's `initial_value`, in dependency order."""
        values = dict(self.data)
        for name in self._dependency_order():
            dist = self.joint[name].bind_from(_resolvable(self.joint, values))
            values[name] = _as_value(dist.initial_value())
        return self.flatten({name: values[name] for name in self.targets})

    def _dependency_order(self):
        order = []

        def visit(name):
            if name in order or name in self.data:
                return
            for parent in self.joint.parents(name):
                if parent in self.joint.deterministic:
                    for source in self.joint.deterministic[parent].depends_on:
                        visit(source)
                else:
                    visit(parent)
            order.append(name)

        for name in self.targets:
            visit(name)
        return order

    def __str__(self):
        observed = ", ".join(self.data) or "nothing"
        return f"Posterior over {self.targets} given {observed}\n{self.joint.factorization()}"


def _as_value(value):
    if isinstance(value, (int, float)):
        return float(value)
    value = np.asarray(value, dtype=float)
    return float(value.reshape(-1)[0]) if value.size == 1 else value


def _resolvable(joint, values):
    """values plus every deterministic node whose inputs are already known."""
    values = dict(values)
    for name in joint.deterministic_order:
        node = joint.deterministic[name]
        if all(parent in values for parent in node.depends_on):
            values[name] = node.evaluate(values)
    return values
