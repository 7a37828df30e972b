import json
import os

import numpy as np
import pytest

from testproblems import (TEST_PROBLEMS, build_test_problem, deconvolution_1d, deconvolution_2d, eight_schools,
                          export_bundle, gravity_problem, phantom_1d, phantom_2d, shapes_phantom, sinc_phantom,
                          square_phantom, total_variation_2d)
from testproblems.eight_schools import S_OBS, Y_OBS, school_effects, school_effects_vjp
from testproblems.gravity_problem import INFORMATIVE_PRIOR_STD, PRIOR_MEAN, PRIOR_STD, TRUE_PARAMETERS
from utilities.geometry import Image2D
from utilities.linalg import load_matrix_csv


def test_phantoms():
    assert sinc_phantom(129)[64] == pytest.approx(1.0)
    assert sinc_phantom(129)[0] == pytest.approx(np.sinc(-2.5))
    np.testing.assert_array_equal(square_phantom(9), [0, 0, 0, 1, 1, 1, 0, 0, 0])
    with pytest.raises(ValueError):
        phantom_1d("gaussian", 16)
    with pytest.raises(ValueError):
        phantom_2d("sinc", 16)


def test_shapes_phantom_layout():
    image = Image2D(40, 40).to_image(shapes_phantom(40))
    assert image[5, 5] == 0.6
    assert image[25, 8] == 0.8
    assert image[30, 28] == 1.0
    assert image[12, 28] == 0.9
    assert image[0, 0] == 0.0
    assert set(np.unique(image)) == {0.0, 0.6, 0.8, 0.9, 1.0}


def test_total_variation_2d():
    assert total_variation_2d(np.ones(16), 4) == 0.0
    image = np.zeros((4, 4))
    image[:, :2] = 1.0
    assert total_variation_2d(Image2D(4, 4).to_vector(image), 4) == pytest.approx(4.0)
    assert total_variation_2d(shapes_phantom(32), 32) > 0


def test_deconvolution_1d_noise_level():
    bundle = deconvolution_1d(seed=0)
    noise = bundle.y_obs - bundle.exact_data
    assert len(bundle.y_obs) == 128
    assert np.std(noise) == pytest.approx(0.01, rel=0.2)
    assert bundle.info["noise"]["precision"] == pytest.approx(1e4)
    np.testing.assert_allclose(bundle.exact_data, bundle.model.forward(bundle.exact_solution))
    assert [dist.name for dist in bundle.distributions] == ["y"]


def test_deconvolution_1d_is_reproducible():
    first, second = deconvolution_1d(n=64, seed=4), deconvolution_1d(n=64, seed=4)
    np.testing.assert_array_equal(first.y_obs, second.y_obs)
    assert not np.array_equal(first.y_obs, deconvolution_1d(n=64, seed=5).y_obs)


def test_deconvolution_1d_options():
    exact = deconvolution_1d(n=16, phantom="square", noise_std=0.0)
    np.testing.assert_array_equal(exact.y_obs, exact.exact_data)
    assert exact.distributions == ()
    assert exact.info["noise"]["precision"] is None
    with pytest.raises(ValueError):
        deconvolution_1d(n=3)
    with pytest.raises(ValueError):
        deconvolution_1d(noise_std=-1.0)


def test_deconvolution_2d_noise_level():
    bundle = deconvolution_2d(N=32, seed=0)
    assert bundle.model.domain_geometry == Image2D(32, 32)
    noise = bundle.y_obs - bundle.exact_data
    assert np.std(noise) == pytest.approx(7.716e4 ** -0.5, rel=0.2)
    assert bundle.info["phantom"] == "shapes"


def test_gravity_problem():
    bundle = gravity_problem(seed=1)
    assert len(bundle.y_obs) == 100
    np.testing.assert_array_equal(bundle.exact_solution, TRUE_PARAMETERS)
    assert np.max(np.abs(bundle.y_obs - bundle.exact_data)) < 1e-5
    likelihood, prior = bundle.distributions
    assert (likelihood.name, prior.name) == ("y", "x")
    np.testing.assert_array_equal(prior.mean_vector(), PRIOR_MEAN)
    assert prior.geometry.variable_names() == ["z", "rho", "r"]
    assert bundle.info["prior"]["std"] == PRIOR_STD.tolist()
    assert gravity_problem(informative=True).info["prior"]["std"] == INFORMATIVE_PRIOR_STD.tolist()


def test_eight_schools_bundle():
    bundle = eight_schools()
    np.testing.assert_array_equal(bundle.y_obs, Y_OBS)
    assert bundle.model is None
    assert bundle.joint.variables == ["y", "u", "t", "xp"]
    np.testing.assert_array_equal(bundle.info["s_obs"], S_OBS)
    xp = np.arange(8.0)
    np.testing.assert_allclose(school_effects(1.0, 2.0, xp), 1.0 + 2.0 * xp)
    pulled = school_effects_vjp(np.ones(8), 1.0, 2.0, xp)
    assert pulled["u"] == 8.0
    assert pulled["t"] == pytest.approx(xp.sum())
    np.testing.assert_allclose(pulled["xp"], 2.0 * np.ones(8))


def test_registry():
    assert set(TEST_PROBLEMS) == {"deconvolution_1d", "deconvolution_2d", "gravity", "eight_schools"}
    assert len(build_test_problem("deconvolution_1d", n=8, seed=0).y_obs) == 8
    with pytest.raises(ValueError):
        build_test_problem("heat_1d")


def test_export_bundle(tmp_path):
    bundle = deconvolution_1d(n=16, seed=2)
    written = export_bundle(bundle, str(tmp_path), "blur")
    assert set(written) == {"model", "data", "info"}
    np.testing.assert_array_equal(load_matrix_csv(written["model"]), bundle.model.to_dense())
    np.testing.assert_array_equal(load_matrix_csv(written["data"]).reshape(-1), bundle.y_obs)
    with open(written["info"]) as file:
        info = json.load(file)
    assert info["noise"]["std"] == 0.01
    assert info["seed"] == 2
    assert info["domain_geometry"] == {"variant": "Continuous1D", "shape": [16], "interval": [0.0, 1.0]}
    assert len(info["exactSolution"]) == 16


def test_export_bundle_without_a_model(tmp_path):
    written = export_bundle(eight_schools(), str(tmp_path / "schools"), "eight_schools")
    assert set(written) == {"data", "info"}
    assert os.path.exists(written["data"])
