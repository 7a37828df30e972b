import logging
import time

import numpy as np

from samples.samples import Samples
from samplers.chain_result import ChainResult
from samplers.sampler_config import SamplerConfig
from utilities.errors import CapabilityError, DomainError
from utilities.rng import as_generator

logger = logging.getLogger(__name__)


class Sampler:
    """
    Shared chain contract: a target posterior, a current state and one `step` per iteration.

    Subclasses implement `step(rng)` returning the acceptance (0..1) of the transition and
    optionally `tune` (called during burn-in only) and `end_burn_in`. The state is a flat vector
    of the target's variables. Gibbs sweeps reuse one instance per variable through `retarget`.
    """

    name = "Sampler"
    needs_gradient = False

    def __init__(self, target, config=None):
        self.config = config if config is not None else SamplerConfig(kind=self.name)
        self.target = None
        self.state = None
        self.logp = None
        self.n_evaluations = 0
        self.divergences = 0
        self.adaptation_trace = []
        self._tune_count = 0
        self.retarget(target)

    def retarget(self, target):
        """Switch to a new target (a Gibbs conditional); the state is re-evaluated on `set_state`."""
        if self.needs_gradient and not target.has_gradient:
            raise CapabilityError(f"{self.name} needs gradients, which this target does not provide")
        self.target = target
        self.logp = None

    # ---------------------------------------------------------------- evaluations

    def log_density(self, x):
        """Target log density; evaluations outside the model domain count as -inf."""
        self.n_evaluations += 1
        try:
            value = float(self.target.logpdf(x))
        except DomainError:
            return -np.inf
        return value if not np.isnan(value) else -np.inf

    def gradient(self, x):
        self.n_evaluations += 1
        return self.target.gradient(x)

    def log_density_and_gradient(self, x):
        """(logp, gradient); the gradient is zero wherever the log density is -inf."""
        logp = self.log_density(x)
        if not np.isfinite(logp):
            return -np.inf, np.zeros_like(x)
        try:
            grad = self.gradient(x)
        except DomainError:
            return -np.inf, np.zeros_like(x)
        if not np.all(np.isfinite(grad)):
            return -np.inf, np.zeros_like(x)
        return logp, grad

    # ---------------------------------------------------------------- chain

    def set_state(self, x):
        x = np.array(x, dtype=float).reshape(-1)
        logp = self.log_density(x)
        if not np.isfinite(logp):
            raise DomainError(f"{self.name} cannot start at a point with zero posterior density: {x}")
        self.state = x
        self.logp = logp

    def step(self, rng):
        raise NotImplementedError

    def tune(self, iteration, acceptance):
        pass

    def end_burn_in(self):
        pass

    def advance(self, rng, burn_in):
        """One transition; adapts when in burn-in and adaptation is enabled."""
        acceptance = self.step(rng)
        if burn_in and self.config.adapt:
            self.tune(self._tune_count, acceptance)
            self._tune_count += 1
        return acceptance

    def sample(self, N, Nb=0, rng=None, x0=None):
        """
        Run a chain.

        :param {int} N: Number of states kept after burn-in
        :param {int} Nb: Number of burn-in states (adaptation happens only here)
        :param rng: Seed or numpy Generator
        :param x0: Starting point (dict or flat vector); defaults to the target's initial point
        :return: {ChainResult}
        """
        if N < 1 or Nb < 0:
            raise ValueError(f"Need N >= 1 and Nb >= 0, got N={N}, Nb={Nb}")
        seed = rng if isinstance(rng, (int, np.integer)) else None
        rng = as_generator(rng)
        if x0 is None:
            x0 = self.target.initial_point()
        elif isinstance(x0, dict):
            x0 = self.target.flatten(x0)
        logger.info("%s: sampling %s states after %s burn-in states", self.name, N, Nb)
        start = time.perf_counter()
        self.set_state(x0)
        draws = np.empty((N, self.target.dim))
        accepted = 0.0
        for k in range(Nb + N):
            if k == Nb and Nb > 0:
                self.end_burn_in()
            acceptance = self.advance(rng, burn_in=k < Nb)
            if k >= Nb:
                draws[k - Nb] = self.state
                accepted += acceptance
        wall_time = time.perf_counter() - start
        rate = accepted / N
        logger.info("%s: done in %.2fs, acceptance rate %.3f", self.name, wall_time, rate)
        if self.divergences:
            logger.info("%s: %s divergent transitions", self.name, self.divergences)
        return ChainResult(self._to_samples(draws, seed), rate, self.name, seed, wall_time,
                           list(self.adaptation_trace), self.divergences, self.n_evaluations, Nb)

    def _to_samples(self, draws, seed):
        provenance = {"sampler": self.name, "seed": seed}
        return {name: Samples(block, self.target.geometry(name), name, provenance)
                for name, block in self.target.split(draws).items()}

    def _single_target(self):
        if len(self.target.targets) != 1:
            raise CapabilityError(f"{self.name} updates a single variable; use it inside a Gibbs plan "
                                  f"for targets {self.target.targets}")
        return self.target.targets[0]
