import numpy as np

from distributions import Gaussian
from models.convolution import DEFAULT_PSF_STD, convolution_model_1d, convolution_model_2d
from testproblems.phantoms import phantom_1d, phantom_2d
from testproblems.test_problem_bundle import DATA_VARIABLE, TestProblemBundle
from utilities.rng import as_generator

DEFAULT_NOISE_STD_1D = 0.01
DEFAULT_NOISE_PRECISION_2D = 7.716e4


def _noisy_bundle(model, exact_solution, noise_std, seed, phantom):
    exact_data = model.forward(exact_solution)
    rng = as_generator(seed)
    y_obs = exact_data + noise_std * rng.standard_normal(len(exact_data)) if noise_std > 0 else exact_data.copy()
    info = {
        "exactSolution": exact_solution,
        "exactData": exact_data,
        "noise": {"type": "gaussian", "std": float(noise_std),
                  "precision": float(noise_std ** -2) if noise_std > 0 else None},
        "seed": seed,
        "phantom": phantom,
    }
    distributions = ()
    if noise_std > 0:
        distributions = (Gaussian(model.of("x"), sqrtcov=noise_std, name=DATA_VARIABLE),)
    return TestProblemBundle(model, y_obs, info, distributions)


def deconvolution_1d(n=128, phantom="sinc", psf_std=DEFAULT_PSF_STD, noise_std=DEFAULT_NOISE_STD_1D, seed=None):
    """
    Gaussian deblurring of a 1D signal on the unit interval.

    :param {int} n: Signal length, at least 4
    :param {str} phantom: sinc or square
    :param {float} psf_std: Blur standard deviation in grid points
    :param {float} noise_std: Standard deviation of the additive Gaussian noise; 0 gives exact data
    :param seed: Noise seed
    :return: {TestProblemBundle}
    """
    if n < 4:
        raise ValueError(f"deconvolution_1d needs n >= 4, got {n}")
    if noise_std < 0:
        raise ValueError(f"noise_std must be non-negative, got {noise_std}")
    exact_solution = phantom_1d(phantom, n)
    return _noisy_bundle(convolution_model_1d(n, psf_std), exact_solution, noise_std, seed, phantom)


def deconvolution_2d(N=128, phantom="shapes", psf_std=DEFAULT_PSF_STD, noise_std=None, seed=None):
    """
    Separable Gaussian deblurring of an N x N image.

    The default noise has precision 7.716e4, i.e. standard deviation about 3.6e-3.
    """
    if N < 4:
        raise ValueError(f"deconvolution_2d needs N >= 4, got {N}")
    if noise_std is None:
        noise_std = DEFAULT_NOISE_PRECISION_2D ** -0.5
    if noise_std < 0:
        raise ValueError(f"noise_std must be non-negative, got {noise_std}")
    exact_solution = phantom_2d(phantom, N)
    return _noisy_bundle(convolution_model_2d(N, psf_std), exact_solution, noise_std, seed, phantom)


def total_variation_2d(image_vector, N):
    """Anisotropic total variation of a column-stacked N x N image."""
    image = np.asarray(image_vector).reshape(N, N, order="F")
    return float(np.abs(np.diff(image, axis=0)).sum() + np.abs(np.diff(image, axis=1)).sum())
