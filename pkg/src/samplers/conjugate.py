import numpy as np

from inference.conjugacy import detect_conjugacy
from samplers.rto import LinearRTO
from samplers.sampler import Sampler
from utilities.errors import CapabilityError
from utilities.rng import as_generator


class Conjugate(Sampler):
    """Direct draws from a recognized closed-form conditional."""

    name = "Conjugate"
    accepts_approximate = False

    def retarget(self, target):
        super().retarget(target)
        self.variable = self._single_target()
        self.descriptor = detect_conjugacy(target, self.variable)
        if self.descriptor is None:
            raise CapabilityError(f"No conjugate relation found for '{self.variable}'")
        if not self.descriptor.exact and not self.accepts_approximate:
            raise CapabilityError(f"'{self.variable}' only has an approximate conjugate relation; "
                                  f"use ConjugateApprox")
        self._gaussian = LinearRTO(target, self.config) if self.descriptor.family == "Gaussian" else None

    def set_state(self, x):
        self.state = np.array(x, dtype=float).reshape(-1)
        self.logp = None

    def step(self, rng):
        if self._gaussian is not None:
            self._gaussian.set_state(self.state)
            self._gaussian.step(rng)
            self.state = self._gaussian.state
            return 1.0
        conditional = self.descriptor.gamma_conditional(self.target, self.target.unflatten(self.state))
        self.n_evaluations += 1
        self.state = np.atleast_1d(conditional._sample(rng)).astype(float)
        return 1.0


class ConjugateApprox(Conjugate):
    """Gamma update for an LMRF inverse scale, as if the relation were conjugate."""

    name = "ConjugateApprox"
    accepts_approximate = True


def _conditional_draw(sampler_class, posterior, variable, current, rng):
    conditional = posterior.conditional(variable, current)
    sampler = sampler_class(conditional)
    sampler.set_state(np.atleast_1d(np.asarray(current[variable], dtype=float)))
    sampler.step(as_generator(rng))
    return conditional.unflatten(sampler.state)[variable]


def conjugate_step(posterior, variable, current, rng):
    """
    One draw of `variable` from its closed-form conditional.

    :param {Posterior} posterior: Posterior containing `variable` as a target
    :param {dict} current: Values of every target; the others stay fixed
    :return: new value of `variable` (float for scalars)
    """
    return _conditional_draw(Conjugate, posterior, variable, current, rng)


def conjugate_approx_step(posterior, variable, current, rng):
    return _conditional_draw(ConjugateApprox, posterior, variable, current, rng)
