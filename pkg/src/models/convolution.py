# Gaussian blur operators for signal and image deblurring.
#
# The point spread function is a Gaussian with standard deviation `psf_std` in grid units,
# truncated at +-4 standard deviations and normalized to unit sum. Boundaries are zero.

import numpy as np
import scipy.sparse as sps

from models.forward_model import LinearModel
from utilities.geometry import Continuous1D, Image2D
from utilities.linalg import KroneckerOperator, SparseOperator

# Default PSF width when a test problem does not set one
DEFAULT_PSF_STD = 3.0
TRUNCATION = 4.0


def gaussian_psf(psf_std):
    """
    Discrete Gaussian kernel centred on the middle entry.

    :param {float} psf_std: Standard deviation in grid points, > 0
    :return: {np.ndarray} Kernel of odd length 2*radius + 1 summing to one
    """
    if psf_std <= 0:
        raise ValueError(f"psf_std must be positive, got {psf_std}")
    radius = max(int(np.ceil(TRUNCATION * psf_std)), 1)
    offsets = np.arange(-radius, radius + 1)
    kernel = np.exp(-0.5 * (offsets / psf_std) ** 2)
    return kernel / kernel.sum()


def blur_matrix(n, psf_std):
    """
    n x n banded Toeplitz blur matrix with zero boundary conditions.

    :param {int} n: Signal length
    :param {float} psf_std: PSF standard deviation in grid points
    :return: {scipy.sparse.csr_matrix}
    """
    if n < 1:
        raise ValueError(f"Signal length must be at least 1, got {n}")
    kernel = gaussian_psf(psf_std)
    radius = len(kernel) // 2
    offsets = [k for k in range(-radius, radius + 1) if abs(k) < n]
    diagonals = [np.full(n - abs(k), kernel[radius + k]) for k in offsets]
    return sps.diags(diagonals, offsets, shape=(n, n), format="csr")


def convolution_model_1d(n, psf_std=DEFAULT_PSF_STD, interval=(0.0, 1.0)):
    """
    Gaussian blur of a 1D signal.

    :param {int} n: Signal length
    :param {float} psf_std: PSF standard deviation in grid points
    :param {tuple} interval: Interval carried by the Continuous1D geometries
    :return: {LinearModel}
    """
    geometry = Continuous1D(n, interval)
    return LinearModel(SparseOperator(blur_matrix(n, psf_std)), geometry, geometry)


def convolution_model_2d(N, psf_std=DEFAULT_PSF_STD):
    """
    Separable Gaussian blur of an N x N image, B kron B acting on column-stacked images.

    :param {int} N: Image side length
    :param {float} psf_std: PSF standard deviation in pixels
    :return: {LinearModel}
    """
    blur = blur_matrix(N, psf_std)
    geometry = Image2D(N, N)
    return LinearModel(KroneckerOperator(blur, blur), geometry, geometry)
