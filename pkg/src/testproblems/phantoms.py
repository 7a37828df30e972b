# Ground-truth signals and images for the deblurring problems.
#
# Grids are cell-free: a signal of length n is sampled at t_i = i / (n - 1), i = 0..n-1.
# Images are N x N and returned column-stacked.

import numpy as np

from utilities.geometry import Image2D

PHANTOMS_1D = ("sinc", "square")
PHANTOMS_2D = ("shapes",)

# (row start, row stop, col start, col stop, value) as fractions of the image side
SHAPES_RECTANGLES = (
    (0.10, 0.35, 0.10, 0.45, 0.6),
    (0.55, 0.85, 0.15, 0.35, 0.8),
    (0.60, 0.90, 0.60, 0.80, 1.0),
)
# (row centre, col centre, radius, value)
SHAPES_DISC = (0.30, 0.70, 0.15, 0.9)


def sinc_phantom(n):
    """x(t) = sinc(5 (t - 1/2)) with sinc(u) = sin(pi u) / (pi u)."""
    t = np.linspace(0.0, 1.0, n)
    return np.sinc(5.0 * (t - 0.5))


def square_phantom(n):
    """One on the middle third of the grid, zero elsewhere."""
    x = np.zeros(n)
    x[n // 3:n - n // 3] = 1.0
    return x


def shapes_phantom(N):
    """
    Three rectangles (values 0.6, 0.8, 1.0) and one disc (0.9) on a zero background.

    :param {int} N: Image side length
    :return: {np.ndarray} column-stacked image of length N^2
    """
    image = np.zeros((N, N))
    for row0, row1, col0, col1, value in SHAPES_RECTANGLES:
        image[int(row0 * N):int(row1 * N), int(col0 * N):int(col1 * N)] = value
    row, col, radius, value = SHAPES_DISC
    rows, cols = np.meshgrid(np.arange(N) / N, np.arange(N) / N, indexing="ij")
    image[(rows - row) ** 2 + (cols - col) ** 2 <= radius ** 2] = value
    return Image2D(N, N).to_vector(image)


def phantom_1d(name, n):
    if name == "sinc":
        return sinc_phantom(n)
    if name == "square":
        return square_phantom(n)
    raise ValueError(f"Unknown 1D phantom '{name}', options are {list(PHANTOMS_1D)}")


def phantom_2d(name, N):
    if name == "shapes":
        return shapes_phantom(N)
    raise ValueError(f"Unknown 2D phantom '{name}', options are {list(PHANTOMS_2D)}")
