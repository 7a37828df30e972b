import logging

import numpy as np

from samplers.metropolis import accept
from samplers.sampler import Sampler
from utilities.errors import CapabilityError, DomainError

logger = logging.getLogger(__name__)

PCN_TARGET_ACCEPTANCE = 0.25
ADAPTATION_DECAY = 0.6


class PCN(Sampler):
    """
    Preconditioned Crank-Nicolson for a likelihood times a Gaussian prior N(mu, S).

    The proposal x' = mu + sqrt(1 - s^2) (x - mu) + s xi, xi ~ N(0, S), leaves the prior invariant,
    so the acceptance ratio only involves the likelihood.
    """

    name = "pCN"

    def __init__(self, target, config=None):
        super().__init__(target, config)
        self.step_fraction = float(self.config.pcn_step)

    def retarget(self, target):
        super().retarget(target)
        variable = self._single_target()
        self.prior = target.prior(variable)
        if not getattr(self.prior, "is_gaussian", False) or not self.prior.is_fully_specified:
            raise CapabilityError(f"pCN needs a fully specified Gaussian prior on '{variable}', "
                                  f"got {self.prior.family}")
        self.prior_mean = self.prior.mean_vector()

    def log_likelihood(self, x):
        self.n_evaluations += 1
        try:
            value = float(self.target.log_likelihood(x))
        except DomainError:
            return -np.inf
        return value if not np.isnan(value) else -np.inf

    def set_state(self, x):
        super().set_state(x)
        self.loglike = self.log_likelihood(self.state)

    def step(self, rng):
        s = self.step_fraction
        xi = self.prior._sample(rng) - self.prior_mean
        proposal = self.prior_mean + np.sqrt(1.0 - s ** 2) * (self.state - self.prior_mean) + s * xi
        loglike = self.log_likelihood(proposal)
        if accept(rng, loglike - self.loglike):
            self.state, self.loglike = proposal, loglike
            return 1.0
        return 0.0

    def tune(self, iteration, acceptance):
        gain = (iteration + 1) ** -ADAPTATION_DECAY
        self.step_fraction = float(np.clip(self.step_fraction * np.exp(gain * (acceptance - PCN_TARGET_ACCEPTANCE)),
                                           1e-6, 1.0))
        self.adaptation_trace.append(self.step_fraction)

    def end_burn_in(self):
        logger.info("pCN: adapted step s = %.4g", self.step_fraction)
