import numpy as np

from distributions import Gaussian
from models.gravity import PARAMETER_LABELS, GravityModel
from testproblems.test_problem_bundle import DATA_VARIABLE, TestProblemBundle
from utilities.geometry import Discrete
from utilities.rng import as_generator

# (z [m], rho [kg m^-3], r [m])
TRUE_PARAMETERS = np.array([1500.0, 800.0, 1000.0])
PRIOR_MEAN = np.array([1550.0, 850.0, 950.0])
PRIOR_STD = np.array([500.0, 300.0, 300.0])
INFORMATIVE_PRIOR_STD = np.array([500.0, 30.0, 300.0])
NOISE_STD = 1e-6


def gravity_problem(seed=None, informative=False, m=100):
    """
    Buried sphere gravity inversion: infer depth, density contrast and radius from 100
    noisy surface anomaly measurements.

    :param seed: Noise seed
    :param {bool} informative: Use the tight density-contrast prior (std 30 instead of 300)
    :param {int} m: Number of measurements
    :return: {TestProblemBundle} with the Gaussian prior of x and the data density of y
    """
    model = GravityModel(m)
    exact_data = model.forward(TRUE_PARAMETERS)
    y_obs = exact_data + NOISE_STD * as_generator(seed).standard_normal(m)
    prior_std = INFORMATIVE_PRIOR_STD if informative else PRIOR_STD
    prior = Gaussian(PRIOR_MEAN.copy(), sqrtcov=prior_std.copy(), name="x", geometry=Discrete(PARAMETER_LABELS))
    likelihood = Gaussian(model.of("x"), sqrtcov=NOISE_STD, name=DATA_VARIABLE)
    info = {
        "exactSolution": TRUE_PARAMETERS.copy(),
        "exactData": exact_data,
        "noise": {"type": "gaussian", "std": NOISE_STD, "precision": NOISE_STD ** -2},
        "seed": seed,
        "prior": {"mean": PRIOR_MEAN.tolist(), "std": prior_std.tolist()},
    }
    return TestProblemBundle(model, y_obs, info, (likelihood, prior))
