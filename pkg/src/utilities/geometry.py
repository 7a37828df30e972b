# Semantic descriptions of parameter and data spaces.
#
# A geometry knows how many scalars a vector holds and how to lay them out for plotting.
# Image vectors are stored column-stacked (columns of the image on top of each other).

from dataclasses import dataclass, field
import itertools

import numpy as np


class Geometry:
    variant = "Geometry"

    @property
    def par_dim(self):
        raise NotImplementedError

    @property
    def shape(self):
        return (self.par_dim,)

    def plot_coordinates(self):
        raise NotImplementedError

    def variable_names(self):
        """One label per scalar parameter, used for export columns and summary rows."""
        return [str(i) for i in range(self.par_dim)]

    def to_dict(self):
        return {"variant": self.variant, "shape": list(self.shape)}

    def __repr__(self):
        return f"{self.variant}({', '.join(str(s) for s in self.shape)},)"


@dataclass(frozen=True, repr=False)
class Continuous1D(Geometry):
    n: int
    interval: tuple = (0.0, 1.0)
    variant = "Continuous1D"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"Continuous1D needs at least one point, got {self.n}")
        object.__setattr__(self, "interval", (float(self.interval[0]), float(self.interval[1])))

    @property
    def par_dim(self):
        return self.n

    def plot_coordinates(self):
        return np.linspace(self.interval[0], self.interval[1], self.n)

    def to_dict(self):
        return {"variant": self.variant, "shape": [self.n], "interval": list(self.interval)}


@dataclass(frozen=True, repr=False)
class Continuous2D(Geometry):
    nx: int
    ny: int
    variant = "Continuous2D"

    @property
    def par_dim(self):
        return self.nx * self.ny

    @property
    def shape(self):
        return self.nx, self.ny

    def plot_coordinates(self):
        # Grid points on the unit square in the same (column-stacked) order as the parameters
        xs, ys = np.meshgrid(np.linspace(0.0, 1.0, self.nx), np.linspace(0.0, 1.0, self.ny), indexing="ij")
        return np.column_stack([xs.reshape(-1, order="F"), ys.reshape(-1, order="F")])


@dataclass(frozen=True, repr=False)
class Image2D(Geometry):
    rows: int
    cols: int
    variant = "Image2D"

    @property
    def par_dim(self):
        return self.rows * self.cols

    @property
    def shape(self):
        return self.rows, self.cols

    def plot_coordinates(self):
        return list(itertools.product(range(self.rows), range(self.cols)))

    def to_image(self, x):
        return np.asarray(x).reshape(self.rows, self.cols, order="F")

    def to_vector(self, image):
        return np.asarray(image).reshape(-1, order="F")


@dataclass(frozen=True, repr=False)
class Discrete(Geometry):
    labels: tuple
    variant = "Discrete"

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"Discrete labels must be unique, got {list(labels)}")
        object.__setattr__(self, "labels", labels)

    @property
    def par_dim(self):
        return len(self.labels)

    def plot_coordinates(self):
        return list(self.labels)

    def variable_names(self):
        return list(self.labels)

    def to_dict(self):
        return {"variant": self.variant, "shape": [self.par_dim], "labels": list(self.labels)}

    def __repr__(self):
        return f"Discrete({list(self.labels)})"


@dataclass(frozen=True, repr=False)
class Mapped(Geometry):
    """Wraps another geometry; `map_function` turns parameters into the values a model consumes."""
    inner: Geometry
    map_function: object = field(default=None, compare=False)
    variant = "Mapped"

    @property
    def par_dim(self):
        return self.inner.par_dim

    @property
    def shape(self):
        return self.inner.shape

    def plot_coordinates(self):
        return self.inner.plot_coordinates()

    def variable_names(self):
        return self.inner.variable_names()

    def apply_map(self, x):
        return x if self.map_function is None else self.map_function(x)

    def to_dict(self):
        return {"variant": self.variant, "shape": list(self.shape), "inner": self.inner.to_dict()}

    def __repr__(self):
        return f"Mapped({self.inner!r})"


def par_dim(geometry):
    return geometry.par_dim


def plot_coordinates(geometry):
    return geometry.plot_coordinates()


def geometry_from_dict(descriptor):
    """
    Rebuild a geometry from the JSON descriptor written into export sidecars.

    :param {dict} descriptor: Output of Geometry.to_dict()
    :return: {Geometry}
    """
    variant = descriptor["variant"]
    shape = descriptor.get("shape", [])
    if variant == "Continuous1D":
        return Continuous1D(shape[0], tuple(descriptor.get("interval", (0.0, 1.0))))
    if variant == "Continuous2D":
        return Continuous2D(*shape)
    if variant == "Image2D":
        return Image2D(*shape)
    if variant == "Discrete":
        return Discrete(tuple(descriptor["labels"]))
    if variant == "Mapped":
        # The map function is code and cannot be serialized; the inner layout survives
        return Mapped(geometry_from_dict(descriptor["inner"]))
    raise ValueError(f"Unknown geometry variant '{variant}'")


def default_geometry(dim):
    return Continuous1D(int(dim))
