# Randomize-then-optimize samplers for linear models with Gaussian likelihoods.

import logging

import numpy as np

from inference.linear_gaussian import laplace_prior_block, linear_gaussian_system
from samplers.sampler import Sampler
from utilities.errors import CapabilityError
from utilities.linalg import StackedOperator, cgls_solve

logger = logging.getLogger(__name__)


class LinearRTO(Sampler):
    """
    Exact draws from a linear-Gaussian posterior.

    Each draw solves min ||M x - (b + z)||, z ~ N(0, I), with M and b the whitened likelihood rows
    stacked on the prior square-root precision rows. The previous draw warm-starts CGLS.
    """

    name = "LinearRTO"

    def retarget(self, target):
        super().retarget(target)
        self._single_target()
        self.system = linear_gaussian_system(target)
        self.operator = self.system.operator()
        self.rhs = self.system.rhs()
        self.unconverged = 0

    def set_state(self, x):
        self.state = np.array(x, dtype=float).reshape(-1)
        self.logp = None

    def solve(self, operator, rhs, rng):
        result = cgls_solve(operator, rhs + rng.standard_normal(rhs.shape), max_iter=self.config.cgls_max_iter,
                            tol=self.config.cgls_tol, x0=self.state)
        self.n_evaluations += 2 * max(result.iterations, 1)
        if not result.converged:
            self.unconverged += 1
            logger.debug("%s: CGLS stopped at relative residual %.3e", self.name, result.relative_residual)
        return result.x

    def step(self, rng):
        self.state = self.solve(self.operator, self.rhs, rng)
        return 1.0


class UGLA(LinearRTO):
    """
    Unadjusted Gaussian (Laplace) approximation for LMRF priors.

    Around the current state the LMRF prior is replaced by a Gaussian with precision
    (w / b) D^T W D, W = diag(1 / (|D x| + beta)), and the next state is one RTO draw from the
    resulting linear-Gaussian posterior. There is no accept/reject step.
    """

    name = "UGLA"

    def retarget(self, target):
        Sampler.retarget(self, target)
        variable = self._single_target()
        self.prior = target.prior(variable)
        if self.prior.family != "LMRF" or not self.prior.is_fully_specified:
            raise CapabilityError(f"UGLA needs a fully specified LMRF prior on '{variable}', got {self.prior.family}")
        self.system = linear_gaussian_system(target, require_gaussian_prior=False)
        self.unconverged = 0

    def step(self, rng):
        prior_operator, prior_rhs = laplace_prior_block(self.prior, self.state, self.config.ugla_beta)
        operator = StackedOperator([op for op, _ in self.system.likelihood] + [prior_operator])
        rhs = np.concatenate([rhs for _, rhs in self.system.likelihood] + [prior_rhs])
        self.state = self.solve(operator, rhs, rng)
        return 1.0
