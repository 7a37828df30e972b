# Langevin samplers. With f = -log posterior, the Euler-Maruyama step of the Langevin diffusion is
#     x' = x - h grad f(x) + sqrt(2h) z.
# ULA accepts every step; MALA uses it as an MH proposal.

import logging

import numpy as np

from samplers.metropolis import accept
from samplers.sampler import Sampler

logger = logging.getLogger(__name__)

DEFAULT_STEP_SIZE = 0.1
MALA_TARGET_ACCEPTANCE = 0.574
ADAPTATION_DECAY = 0.6


class ULA(Sampler):
    """Unadjusted Langevin algorithm; biased for any h > 0 and not a Metropolis-Hastings method."""

    name = "ULA"
    needs_gradient = True

    def __init__(self, target, config=None):
        super().__init__(target, config)
        self.h = float(self.config.step_size or DEFAULT_STEP_SIZE)

    def set_state(self, x):
        super().set_state(x)
        self.logp, self.grad = self.log_density_and_gradient(self.state)

    def step(self, rng):
        proposal = self.state + self.h * self.grad + np.sqrt(2.0 * self.h) * rng.standard_normal(self.state.shape)
        logp, grad = self.log_density_and_gradient(proposal)
        if not np.isfinite(logp):
            # Left the support; the unadjusted chain stays put
            return 0.0
        self.state, self.logp, self.grad = proposal, logp, grad
        return 1.0


class MALA(ULA):
    """Metropolis-adjusted Langevin algorithm: the ULA step as proposal plus an MH correction."""

    name = "MALA"

    def log_proposal(self, to, start, grad_start):
        """log q(to | start) up to a constant, q = N(start + h grad, 2h I)."""
        residual = to - start - self.h * grad_start
        return -float(residual @ residual) / (4.0 * self.h)

    def log_acceptance_ratio(self, x, x_proposal):
        """log of pi(x') q(x | x') / (pi(x) q(x' | x))."""
        x = np.asarray(x, dtype=float)
        x_proposal = np.asarray(x_proposal, dtype=float)
        logp, grad = self.log_density_and_gradient(x)
        logp_new, grad_new = self.log_density_and_gradient(x_proposal)
        return self._log_ratio(x, logp, grad, x_proposal, logp_new, grad_new)

    def _log_ratio(self, x, logp, grad, x_new, logp_new, grad_new):
        if not np.isfinite(logp_new):
            return -np.inf
        return (logp_new - logp + self.log_proposal(x, x_new, grad_new)
                - self.log_proposal(x_new, x, grad))

    def step(self, rng):
        proposal = self.state + self.h * self.grad + np.sqrt(2.0 * self.h) * rng.standard_normal(self.state.shape)
        logp, grad = self.log_density_and_gradient(proposal)
        log_ratio = self._log_ratio(self.state, self.logp, self.grad, proposal, logp, grad)
        if accept(rng, log_ratio):
            self.state, self.logp, self.grad = proposal, logp, grad
            return 1.0
        return 0.0

    def tune(self, iteration, acceptance):
        gain = (iteration + 1) ** -ADAPTATION_DECAY
        self.h *= np.exp(gain * (acceptance - MALA_TARGET_ACCEPTANCE))
        self.adaptation_trace.append(self.h)

    def end_burn_in(self):
        logger.info("MALA: adapted step size h = %.4g", self.h)
