# Whitened least-squares form of a linear-Gaussian conditional.
#
# For data y_k ~ Gaussian(A_k x, Sigma_k) and prior x ~ Gaussian(mu, Q^-1) with C^T C = Q, the
# conditional of x is the Gaussian whose mean minimizes
#     sum_k ||W_k A_k x - W_k y_k||^2 + ||C x - C mu||^2,    W_k^T W_k = Sigma_k^-1.
# Adding standard normal noise to the right-hand side and solving again gives an exact draw.

from dataclasses import dataclass

import numpy as np

from inference.conjugacy import linear_partner
from utilities.errors import CapabilityError
from utilities.geometry import default_geometry
from utilities.linalg import IdentityOperator, ProductOperator, StackedOperator, cgls_solve


@dataclass
class LinearGaussianSystem:
    variable: str
    likelihood: list
    prior_operator: object
    prior_rhs: np.ndarray
    prior_mean: np.ndarray

    def operator(self, prior_operator=None):
        prior_operator = self.prior_operator if prior_operator is None else prior_operator
        blocks = [op for op, _ in self.likelihood]
        if prior_operator is not None:
            blocks.append(prior_operator)
        return StackedOperator(blocks)

    def rhs(self, prior_rhs=None):
        prior_rhs = self.prior_rhs if prior_rhs is None else prior_rhs
        parts = [rhs for _, rhs in self.likelihood]
        if prior_rhs is not None:
            parts.append(prior_rhs)
        return np.concatenate(parts)

    def likelihood_operator(self):
        if not self.likelihood:
            raise CapabilityError(f"'{self.variable}' has no observations to fit")
        return StackedOperator([op for op, _ in self.likelihood])

    def likelihood_rhs(self):
        return np.concatenate([rhs for _, rhs in self.likelihood])


def _partner_blocks(conditional, variable):
    values = {name: value for name, value in conditional._values(conditional.initial_point()).items()
              if name != variable}
    blocks = []
    for partner in conditional.likelihood_terms():
        raw = conditional.joint[partner]
        model = linear_partner(raw, variable)
        if model is None:
            raise CapabilityError(f"'{partner}' is not a linear Gaussian observation of '{variable}'")
        dist = raw.bind_from(values)
        observed = np.atleast_1d(np.asarray(values[partner], dtype=float))
        if dist.geometry is None:
            dist = dist.with_geometry(default_geometry(len(observed)))
        operator = IdentityOperator(len(observed)) if model == "identity" else model.operator
        whitening = dist.sqrt_precision()
        blocks.append((ProductOperator(whitening, operator), whitening.apply(observed)))
    return blocks


def linear_gaussian_system(posterior, variable=None, point=None, require_gaussian_prior=True):
    """
    Assemble the whitened least-squares system of one target's conditional.

    :param {Posterior} posterior: Posterior containing the variable
    :param {str} variable: Target to keep free; defaults to the only target
    :param point: Current values of the other targets when there are several
    :param {bool} require_gaussian_prior: When False any prior is accepted and non-Gaussian ones get no prior block
    :return: {LinearGaussianSystem}
    """
    variable = variable or _only_target(posterior)
    conditional = posterior
    if len(posterior.targets) > 1:
        if point is None:
            point = posterior.initial_point()
        conditional = posterior.conditional(variable, point)
    prior = conditional.prior(variable)
    blocks = _partner_blocks(conditional, variable)

    if getattr(prior, "is_gaussian", False):
        sqrt_precision = prior.sqrt_precision()
        mean = prior.mean_vector()
        return LinearGaussianSystem(variable, blocks, sqrt_precision, sqrt_precision.apply(mean), mean)
    if require_gaussian_prior:
        raise CapabilityError(f"'{variable}' needs a Gaussian prior for linear RTO, got {prior.family}")
    return LinearGaussianSystem(variable, blocks, None, None, prior.initial_value())


def laplace_prior_block(prior, x, beta):
    """
    Rows and right-hand side of the Gaussian approximation of an LMRF prior around x.

    Each difference block D_k with weight w_k becomes rows sqrt(w_k / (b (|D_k x| + beta))) D_k.
    """
    location = prior.location_vector()
    b = prior.strength
    operators, rhs = [], []
    for weight, block in zip(prior.block_weights(), prior.difference_blocks()):
        scales = np.sqrt(weight / (b * (np.abs(block.apply(x - location)) + beta)))
        scaled = block.scaled(scales)
        operators.append(scaled)
        rhs.append(scaled.apply(location))
    return StackedOperator(operators), np.concatenate(rhs)


def solve_system(system, max_iter=1000, tol=1e-6, x0=None, rhs=None, operator=None):
    operator = system.operator() if operator is None else operator
    rhs = system.rhs() if rhs is None else rhs
    return cgls_solve(operator, rhs, max_iter=max_iter, tol=tol, x0=x0)


def gaussian_posterior(posterior, variable=None, point=None):
    """
    Dense mean and covariance of a linear-Gaussian conditional.

    :return: {tuple} (mean, covariance)
    """
    system = linear_gaussian_system(posterior, variable, point)
    matrix = system.operator().to_dense()
    rhs = system.rhs()
    hessian = matrix.T @ matrix
    covariance = np.linalg.inv(hessian)
    mean = np.linalg.solve(hessian, matrix.T @ rhs)
    return mean, 0.5 * (covariance + covariance.T)


def _only_target(posterior):
    if len(posterior.targets) != 1:
        raise ValueError(f"Name the variable; the posterior has targets {posterior.targets}")
    return posterior.targets[0]
