# Deferred distribution parameters: values that are functions of other named variables.

class Deferred:
    """
    A parameter value computed from named conditioning variables.

    The function takes one positional argument per name in `depends_on`, in that order.
    `tag` records structure that cannot be read off an opaque function ("identity" for v -> v,
    "reciprocal" for v -> 1/v, "model" for a forward model applied to a variable); conjugacy
    detection relies on it.
    """

    def __init__(self, function, depends_on, tag=None, bound=None):
        if isinstance(depends_on, str):
            depends_on = (depends_on,)
        self.function = function
        self.depends_on = tuple(depends_on)
        self.tag = tag
        self._bound = dict(bound or {})

    @classmethod
    def identity(cls, name):
        return cls(lambda value: value, (name,), tag="identity")

    @classmethod
    def reciprocal(cls, name):
        return cls(lambda value: 1.0 / value, (name,), tag="reciprocal")

    @property
    def free_variables(self):
        return tuple(name for name in self.depends_on if name not in self._bound)

    @property
    def variable(self):
        """The single variable of a one-argument deferred value."""
        if len(self.depends_on) != 1:
            raise ValueError(f"Deferred value depends on {list(self.depends_on)}, not a single variable")
        return self.depends_on[0]

    def bind(self, bindings):
        """
        Bind some or all of the variables.

        :param {dict} bindings: name -> value; names this value does not depend on are ignored
        :return: the evaluated value when everything is bound, otherwise a new Deferred
        """
        bound = dict(self._bound)
        bound.update({name: value for name, value in bindings.items() if name in self.depends_on})
        if all(name in bound for name in self.depends_on):
            return self.function(*[bound[name] for name in self.depends_on])
        return self._rebound(bound)

    def _rebound(self, bound):
        return Deferred(self.function, self.depends_on, self.tag, bound)

    def __repr__(self):
        return f"Deferred({list(self.free_variables)}, tag={self.tag})"


def free_variables(value):
    return value.free_variables if isinstance(value, Deferred) else ()


def resolve(value, bindings):
    return value.bind(bindings) if isinstance(value, Deferred) else value
