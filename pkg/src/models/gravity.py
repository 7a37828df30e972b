# Vertical gravity anomaly at the surface caused by a buried sphere.
#
# Parameters x = (z, rho, r): depth of the sphere centre [m], density contrast [kg m^-3] and
# radius [m]. Measurements are taken on an equispaced grid xi along the surface.

import numpy as np

from models.forward_model import ForwardModel
from utilities.errors import DomainError
from utilities.geometry import Continuous1D, Discrete

# Gravitational constant [N m^2 kg^-2]
G = 6.6743e-11
SURVEY_INTERVAL = (-8000.0, 8000.0)
PARAMETER_LABELS = ("z", "rho", "r")


class GravityModel(ForwardModel):

    def __init__(self, m=100):
        """
        :param {int} m: Number of measurement points on the survey line
        """
        if m < 1:
            raise ValueError(f"Need at least one measurement point, got {m}")
        self.xi = np.linspace(SURVEY_INTERVAL[0], SURVEY_INTERVAL[1], m)
        super().__init__(self._gravity, Discrete(PARAMETER_LABELS), Continuous1D(m, SURVEY_INTERVAL),
                         jacobian=self._gravity_jacobian, name="G")

    def _gravity(self, x):
        z, rho, r = self._unpack(x)
        return 4.0 / 3.0 * np.pi * G * (rho * r ** 3 / z ** 2) * (1.0 / (1.0 + (self.xi / z) ** 2)) ** 1.5

    def _gravity_jacobian(self, x):
        z, rho, r = self._unpack(x)
        shape = (1.0 / (1.0 + (self.xi / z) ** 2)) ** 1.5
        d_z = 4.0 / 3.0 * np.pi * G * rho * r ** 3 * (self.xi ** 2 - 2.0 * z ** 2) \
            / (self.xi ** 2 + z ** 2) ** 2.5
        d_rho = 4.0 / 3.0 * np.pi * G * (r ** 3 / z ** 2) * shape
        d_r = 4.0 * np.pi * G * (rho * r ** 2 / z ** 2) * shape
        return np.column_stack([d_z, d_rho, d_r])

    @staticmethod
    def _unpack(x):
        z, rho, r = x
        # The anomaly formula is singular at z = 0 and has no physical meaning above ground
        if z <= 0:
            raise DomainError(f"Sphere depth must be positive, got z={z}")
        return z, rho, r


def gravity_model(m=100):
    return GravityModel(m)
