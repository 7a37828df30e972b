import numpy as np
import pytest

from utilities.geometry import (Continuous1D, Continuous2D, Discrete, Image2D, Mapped, default_geometry,
                                geometry_from_dict)


def test_par_dims_and_shapes():
    assert Continuous1D(128).par_dim == 128
    assert Image2D(4, 6).par_dim == 24
    assert Image2D(4, 6).shape == (4, 6)
    assert Continuous2D(3, 5).par_dim == 15
    assert Discrete(("z", "rho", "r")).par_dim == 3
    assert repr(Continuous1D(128)) == "Continuous1D(128,)"


def test_image_vectors_are_column_stacked():
    geometry = Image2D(2, 3)
    image = np.arange(6).reshape(2, 3)
    vector = geometry.to_vector(image)
    np.testing.assert_array_equal(vector, [0, 3, 1, 4, 2, 5])
    np.testing.assert_array_equal(geometry.to_image(vector), image)


def test_discrete_labels_name_the_coordinates():
    geometry = Discrete(("z", "rho", "r"))
    assert geometry.variable_names() == ["z", "rho", "r"]
    assert Continuous1D(3).variable_names() == ["0", "1", "2"]
    with pytest.raises(ValueError):
        Discrete(("a", "a"))


def test_continuous1d_grid():
    coordinates = Continuous1D(5, (0, 2)).plot_coordinates()
    np.testing.assert_allclose(coordinates, [0.0, 0.5, 1.0, 1.5, 2.0])
    with pytest.raises(ValueError):
        Continuous1D(0)


def test_descriptor_round_trip():
    for geometry in (Continuous1D(7, (-1.0, 1.0)), Continuous2D(3, 4), Image2D(5, 5), Discrete(("a", "b"))):
        assert geometry_from_dict(geometry.to_dict()) == geometry
    mapped = Mapped(Continuous1D(4), np.exp)
    rebuilt = geometry_from_dict(mapped.to_dict())
    assert rebuilt.par_dim == 4
    np.testing.assert_allclose(mapped.apply_map(np.zeros(4)), np.ones(4))
    with pytest.raises(ValueError):
        geometry_from_dict({"variant": "Sphere", "shape": [3]})


def test_default_geometry_is_continuous1d():
    assert default_geometry(9) == Continuous1D(9)
