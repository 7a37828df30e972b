import logging

import numpy as np

from samplers.sampler import Sampler

logger = logging.getLogger(__name__)

# Optimal-scaling acceptance targets for random-walk proposals
MH_TARGET_ACCEPTANCE = 0.234
CWMH_TARGET_ACCEPTANCE = 0.44
# Robbins-Monro gain decays as (k + 1)^-ADAPTATION_DECAY
ADAPTATION_DECAY = 0.6


def accept(rng, log_ratio):
    """Metropolis decision in log space; NaN and -inf ratios reject."""
    return not np.isnan(log_ratio) and bool(np.log(rng.uniform()) < log_ratio)


class MH(Sampler):
    """Random-walk Metropolis-Hastings with an isotropic Gaussian proposal x' = x + scale * z."""

    name = "MH"

    def __init__(self, target, config=None):
        super().__init__(target, config)
        self.scale = float(self.config.scale)

    def step(self, rng):
        proposal = self.state + self.scale * rng.standard_normal(self.state.shape)
        logp = self.log_density(proposal)
        if accept(rng, logp - self.logp):
            self.state, self.logp = proposal, logp
            return 1.0
        return 0.0

    def tune(self, iteration, acceptance):
        if self.scale == 0:
            return
        gain = (iteration + 1) ** -ADAPTATION_DECAY
        self.scale *= np.exp(gain * (acceptance - MH_TARGET_ACCEPTANCE))
        self.adaptation_trace.append(self.scale)

    def end_burn_in(self):
        logger.info("MH: adapted proposal scale %.4g", self.scale)


class CWMH(Sampler):
    """
    Component-wise Metropolis-Hastings: one accept/reject per coordinate per sweep, in coordinate
    order, each coordinate with its own proposal scale.
    """

    name = "CWMH"

    def __init__(self, target, config=None):
        super().__init__(target, config)
        self.scales = None
        self.coordinate_acceptance = None

    def set_state(self, x):
        super().set_state(x)
        if self.scales is None or len(self.scales) != len(self.state):
            self.scales = np.full(len(self.state), float(self.config.scale))

    def step(self, rng):
        accepted = np.zeros(len(self.state))
        for i in range(len(self.state)):
            proposal = self.state.copy()
            proposal[i] += self.scales[i] * rng.standard_normal()
            logp = self.log_density(proposal)
            if accept(rng, logp - self.logp):
                self.state, self.logp = proposal, logp
                accepted[i] = 1.0
        self.coordinate_acceptance = accepted
        return float(accepted.mean())

    def tune(self, iteration, acceptance):
        gain = (iteration + 1) ** -ADAPTATION_DECAY
        adapt = self.scales > 0
        self.scales[adapt] *= np.exp(gain * (self.coordinate_acceptance[adapt] - CWMH_TARGET_ACCEPTANCE))
        self.adaptation_trace.append(self.scales.copy())

    def end_burn_in(self):
        logger.info("CWMH: adapted proposal scales between %.4g and %.4g", self.scales.min(), self.scales.max())
