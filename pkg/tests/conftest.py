import importlib.util
import os

import numpy as np
import pytest

from distributions import GMRF, Gamma, Gaussian
from testproblems import deconvolution_1d

SRC_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "src")


def load_script(file_name):
    """Import one of the hyphen-named scripts in src/ as a module."""
    path = os.path.join(SRC_DIR, file_name)
    spec = importlib.util.spec_from_file_location(file_name.replace("-", "_")[:-3], path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def finite_difference_gradient(function, x, step=1e-6):
    """Central differences with a step relative to each coordinate's magnitude."""
    x = np.asarray(x, dtype=float)
    gradient = np.zeros_like(x)
    for i in range(len(x)):
        h = step * max(1.0, abs(x[i]))
        forward, backward = x.copy(), x.copy()
        forward[i] += h
        backward[i] -= h
        gradient[i] = (function(forward) - function(backward)) / (2.0 * h)
    return gradient


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_deconvolution():
    """32-point sinc deblurring with noise std 0.01."""
    return deconvolution_1d(n=32, seed=3)


@pytest.fixture
def gmrf_posterior(small_deconvolution):
    """Linear-Gaussian posterior: GMRF(0, 50) prior, Gaussian(Ax, 0.01^2 I) likelihood."""
    bundle = small_deconvolution
    prior = GMRF(0.0, 50.0, name="x", geometry=bundle.model.domain_geometry)
    return bundle.bayesian_problem(prior).posterior


@pytest.fixture
def hierarchical_problem(small_deconvolution):
    """Deblurring with a Gamma prior on the noise precision s."""
    from utilities.deferred import Deferred

    bundle = small_deconvolution
    model = bundle.model
    s = Gamma(1.0, 1e-4, name="s")
    x = GMRF(0.0, 50.0, name="x", geometry=model.domain_geometry)
    y = Gaussian(model.of("x"), prec=Deferred.identity("s"), name="y")
    return s, x, y, bundle
