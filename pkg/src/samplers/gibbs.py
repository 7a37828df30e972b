import logging

import numpy as np

from inference.linear_gaussian import linear_gaussian_system
from samplers.sampler import Sampler
from samplers.sampler_config import SamplerConfig
from utilities.errors import CapabilityError, ConditioningError
from utilities.linalg import cgls_solve

logger = logging.getLogger(__name__)

# Metropolis-within-Gibbs samplers take several inner steps per sweep
INNER_MCMC_SAMPLERS = ("MH", "CWMH", "pCN", "ULA", "MALA")
DEFAULT_INNER_MCMC_STEPS = 10

# CGLS iterations of the default start of linearly observed targets; truncation regularizes the fit
WARM_START_ITERATIONS = 20


class Gibbs(Sampler):
    """
    Systematic-scan Gibbs sampler: each sweep updates every target, in the order the variables were
    added to the joint distribution, from its conditional given the latest values of the others.

    :param {Posterior} target: Posterior over all variables
    :param {dict} samplers: variable -> sampler name (or a SamplingPlan)
    :param {dict} configs: Optional variable -> SamplerConfig for the per-variable samplers
    """

    name = "Gibbs"

    def __init__(self, target, samplers, configs=None, config=None):
        self.assignment = dict(getattr(samplers, "per_variable", samplers))
        self.configs = dict(configs or {})
        self.samplers = {}
        super().__init__(target, config if config is not None else SamplerConfig(kind="Gibbs"))
        missing = [name for name in target.targets if name not in self.assignment]
        if missing:
            raise ConditioningError(f"The Gibbs plan does not cover {missing}")
        self._accepted = {name: 0.0 for name in target.targets}
        self._kept = 0

    def inner_steps(self, name):
        config = self._config_for(name)
        if config.inner_steps is not None:
            return config.inner_steps
        if self.config.inner_steps is not None:
            return self.config.inner_steps
        if self.assignment[name] in INNER_MCMC_SAMPLERS and len(self.target.targets) > 1:
            return DEFAULT_INNER_MCMC_STEPS
        return 1

    def _config_for(self, name):
        kind = self.assignment[name]
        config = self.configs.get(name)
        if config is None:
            return self.config.with_kind(kind)
        return config if config.kind == kind else config.with_kind(kind)

    def _sampler_for(self, name, conditional):
        from samplers.registry import create_sampler

        sampler = self.samplers.get(name)
        if sampler is None:
            sampler = create_sampler(self.assignment[name], conditional, self._config_for(name))
            self.samplers[name] = sampler
        else:
            sampler.retarget(conditional)
        return sampler

    def update(self, name, rng, burn_in):
        """Replace one variable by a draw (or inner chain end point) from its conditional."""
        point = self.target.unflatten(self.state)
        single = len(self.target.targets) == 1
        conditional = self.target if single else self.target.conditional(name, point)
        sampler = self._sampler_for(name, conditional)
        sampler.set_state(np.atleast_1d(point[name]))
        steps = self.inner_steps(name)
        acceptance = sum(sampler.advance(rng, burn_in) for _ in range(steps)) / steps
        point[name] = sampler.state
        self.state = self.target.flatten(point)
        return acceptance

    def step(self, rng):
        return self.advance(rng, burn_in=False)

    def advance(self, rng, burn_in):
        rates = [self.update(name, rng, burn_in) for name in self.target.targets]
        if not burn_in:
            for name, rate in zip(self.target.targets, rates):
                self._accepted[name] += rate
            self._kept += 1
        return float(np.mean(rates))

    def end_burn_in(self):
        for sampler in self.samplers.values():
            sampler.end_burn_in()

    def warm_start(self):
        """
        Default starting point of a sweep.

        Targets observed through a linear model with Gaussian noise start from a truncated CGLS fit
        to their data; the others keep the prior-based `initial_point`.

        :return: {np.ndarray} Flat point
        """
        point = self.target.unflatten(self.target.initial_point())
        if len(self.target.targets) == 1:
            return self.target.flatten(point)
        for name in self.target.targets:
            if self.target.dim_of(name) == 1:
                continue
            try:
                system = linear_gaussian_system(self.target, name, point, require_gaussian_prior=False)
                operator, rhs = system.likelihood_operator(), system.likelihood_rhs()
            except CapabilityError:
                continue
            fit = cgls_solve(operator, rhs, max_iter=WARM_START_ITERATIONS, tol=self.config.cgls_tol)
            if not np.isfinite(self.log_density(self.target.flatten({**point, name: fit.x}))):
                continue
            logger.info("Gibbs: starting '%s' from a %s-iteration least-squares fit", name, fit.iterations)
            point[name] = fit.x
        return self.target.flatten(point)

    def sample(self, N, Nb=0, rng=None, x0=None):
        if x0 is None:
            x0 = self.warm_start()
        result = super().sample(N, Nb, rng, x0)
        result.acceptance_rate = {name: total / max(self._kept, 1) for name, total in self._accepted.items()}
        result.n_evaluations += sum(sampler.n_evaluations for sampler in self.samplers.values())
        result.divergences += sum(sampler.divergences for sampler in self.samplers.values())
        result.sampler = "Gibbs(" + ", ".join(f"{name}: {kind}" for name, kind in self.assignment.items()) + ")"
        return result
