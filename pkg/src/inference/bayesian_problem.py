import logging

import numpy as np

from inference.estimators import map_estimate, ml_estimate
from inference.joint_distribution import JointDistribution
from inference.sampler_selection import select_sampler
from samples.samples import DEFAULT_CI_LEVEL, stack_chains
from samplers.registry import sampler_for_plan
from utilities.errors import ConditioningError
from utilities.rng import chain_generators

logger = logging.getLogger(__name__)


class BayesianProblem:
    """
    High-level workflow: declare densities, set the observed data, then ask for point estimates,
    a sampling plan or posterior samples.

    :param distributions: Named Distribution objects (or a JointDistribution)
    :param {tuple} deterministic: Deterministic nodes linking the variables
    """

    def __init__(self, *distributions, deterministic=()):
        if len(distributions) == 1 and isinstance(distributions[0], JointDistribution):
            self.joint = distributions[0]
        else:
            self.joint = JointDistribution(*distributions, deterministic=deterministic)
        self.data = {}
        self._posterior = None

    def set_data(self, **data):
        self.data = dict(data)
        self._posterior = self.joint.condition(self.data)
        return self

    @property
    def posterior(self):
        if self._posterior is None:
            self._posterior = self.joint.condition(self.data)
        return self._posterior

    def sampling_plan(self):
        return select_sampler(self.posterior)

    def map(self, **options):
        return _unwrap(map_estimate(self.posterior, **options))

    def ml(self, **options):
        return _unwrap(ml_estimate(self.posterior, **options))

    def sample_posterior(self, N, Nb=None, seed=None, chains=1, plan=None, configs=None):
        """
        Sample with the automatically selected (or a given) plan.

        :param {int} N: Kept states per chain
        :param {int} Nb: Burn-in per chain; defaults to 20% of N
        :param {int} seed: Master seed; chain i uses the i-th child of SeedSequence(seed)
        :param {int} chains: Number of chains
        :return: {ChainResult|list} one result, or a list when chains > 1
        """
        plan = plan or self.sampling_plan()
        Nb = int(0.2 * N) if Nb is None else Nb
        results = []
        for index, rng in enumerate(chain_generators(seed, chains)):
            result = sampler_for_plan(self.posterior, plan, configs).sample(N, Nb, rng)
            result.seed = seed if chains == 1 else f"{seed}/{index}"
            results.append(result)
        return results[0] if chains == 1 else results

    def uq(self, N=1000, Nb=None, seed=None, level=DEFAULT_CI_LEVEL):
        """
        Sample the posterior and log a summary table per variable.

        :return: {dict} variable -> pandas DataFrame with mean, std, credibility bounds and ESS
        """
        result = self.sample_posterior(N, Nb, seed)
        summaries = {}
        for name in self.posterior.targets:
            summaries[name] = result[name].summary(level)
            logger.info("Posterior summary for %s:\n%s", name, summaries[name].to_string())
        return summaries

    def __str__(self):
        observed = f"\nObserved: {', '.join(self.data)}" if self.data else ""
        return f"BayesianProblem with\n{self.joint.describe()}{observed}"


def pooled_samples(results, name):
    """All chains of one variable as a single Samples object."""
    if not results:
        raise ConditioningError("No chain results")
    return stack_chains([result[name] for result in results])


def _unwrap(point):
    if len(point) == 1:
        return np.atleast_1d(next(iter(point.values())))
    return point
