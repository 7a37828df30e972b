import logging

from utilities.errors import ConditioningError

logger = logging.getLogger(__name__)


class Deterministic:
    """
    A named variable that is a pure function of other variables, e.g. x = u + t * xp.

    :param {str} name: Name other distributions use to refer to the value
    :param {callable} function: Takes one positional argument per name in depends_on
    :param {tuple} depends_on: Names of the inputs
    :param {callable} vjp: Optional (g, *inputs) -> dict of input name to g^T d function / d input
    """

    def __init__(self, name, function, depends_on, vjp=None):
        self.name = name
        self.function = function
        self.depends_on = (depends_on,) if isinstance(depends_on, str) else tuple(depends_on)
        self.vjp = vjp

    def evaluate(self, values):
        return self.function(*[values[name] for name in self.depends_on])

    def pullback(self, g, values):
        if self.vjp is None:
            return None
        return self.vjp(g, *[values[name] for name in self.depends_on])

    def __repr__(self):
        return f"Deterministic({self.name} <- {list(self.depends_on)})"


class JointDistribution:
    """
    Product of named component densities, p(all) = prod_i p(v_i | conditioning variables of v_i).

    Components are kept in the order they were given; that order is also the Gibbs sweep order.
    """

    def __init__(self, *components, deterministic=()):
        if len(components) == 1 and isinstance(components[0], (list, tuple)):
            components = tuple(components[0])
        if not components:
            raise ValueError("A joint distribution needs at least one component")
        self.components = {}
        for dist in components:
            if not dist.name:
                raise ValueError(f"Every component needs a name, got an unnamed {dist.family}")
            if dist.name in self.components:
                raise ValueError(f"Duplicate variable name '{dist.name}'")
            self.components[dist.name] = dist
        self.deterministic = {}
        for node in deterministic:
            if node.name in self.components or node.name in self.deterministic:
                raise ValueError(f"Duplicate variable name '{node.name}'")
            self.deterministic[node.name] = node
        self._validate_references()
        self.deterministic_order = self._topological_order()

    # ---------------------------------------------------------------- structure

    @property
    def variables(self):
        return list(self.components)

    def __getitem__(self, name):
        return self.components[name]

    def parents(self, name):
        """Direct inputs of a component or deterministic node."""
        if name in self.components:
            return list(self.components[name].conditioning_variables)
        return list(self.deterministic[name].depends_on)

    def children(self, name):
        """Components and deterministic nodes with `name` among their direct inputs."""
        return [other for other in list(self.components) + list(self.deterministic) if name in self.parents(other)]

    def dependents(self, name):
        """Components whose density depends on `name`, directly or through deterministic nodes."""
        found, frontier = [], [name]
        while frontier:
            for child in self.children(frontier.pop()):
                if child in self.deterministic:
                    frontier.append(child)
                elif child not in found:
                    found.append(child)
        return found

    def feeds_deterministic(self, name):
        return any(child in self.deterministic for child in self.children(name))

    def _validate_references(self):
        known = set(self.components) | set(self.deterministic)
        for name in list(self.components) + list(self.deterministic):
            missing = [parent for parent in self.parents(name) if parent not in known]
            if missing:
                raise ConditioningError(
                    f"'{name}' depends on {missing}, which are neither variables nor deterministic nodes; "
                    f"known names are {sorted(known)}")

    def _topological_order(self):
        order, state = [], {}

        def visit(name):
            if state.get(name) == "done":
                return
            if state.get(name) == "visiting":
                raise ValueError(f"Dependency cycle through '{name}'")
            state[name] = "visiting"
            for parent in self.parents(name):
                visit(parent)
            state[name] = "done"
            if name in self.deterministic:
                order.append(name)

        for name in list(self.components) + list(self.deterministic):
            visit(name)
        return order

    # ---------------------------------------------------------------- evaluation

    def resolve(self, assignment):
        """Assignment extended with the values of all deterministic nodes."""
        values = dict(assignment)
        for name in self.deterministic_order:
            node = self.deterministic[name]
            missing = [parent for parent in node.depends_on if parent not in values]
            if missing:
                raise ConditioningError(f"Deterministic node '{name}' needs values for {missing}")
            values[name] = node.evaluate(values)
        return values

    def logpdf(self, assignment):
        """
        Sum of the component log densities.

        :param {dict} assignment: Value for every component variable
        :return: {float}
        """
        missing = [name for name in self.components if name not in assignment]
        if missing:
            raise ConditioningError(f"Assignment is missing variables {missing}")
        values = self.resolve(assignment)
        return float(sum(dist.bind_from(values).logpdf(values[name]) for name, dist in self.components.items()))

    def condition(self, data=None, **kwargs):
        """
        Fix observed variables.

        :param {dict} data: name -> observed value
        :return: {Posterior} over the remaining variables
        """
        from inference.posterior import Posterior

        data = dict(data or {}, **kwargs)
        unknown = [name for name in data if name not in self.components]
        if unknown:
            raise ConditioningError(f"Cannot condition on {unknown}; variables are {self.variables}")
        return Posterior(self, data)

    # ---------------------------------------------------------------- printing

    def factorization(self):
        """The joint density as a product, e.g. p(y,x) = p(y|x)p(x)."""
        factors = []
        for name, dist in self.components.items():
            given = dist.conditioning_variables
            factors.append(f"p({name}|{','.join(given)})" if given else f"p({name})")
        return f"p({','.join(self.components)}) = {''.join(factors)}"

    def describe(self):
        lines = [self.factorization(), ""]
        lines += [f"{name} ~ {dist}" for name, dist in self.components.items()]
        lines += [f"{name} = f({', '.join(node.depends_on)})" for name, node in self.deterministic.items()]
        return "\n".join(lines)

    def __str__(self):
        return f"JointDistribution(\n    Equation:\n\t{self.factorization()}\n    Densities:\n" + "".join(
            f"\t{name} ~ {dist}\n" for name, dist in self.components.items()) + ")"


def joint_logpdf(joint, assignment):
    return joint.logpdf(assignment)


def condition_joint(joint, data):
    return joint.condition(data)
