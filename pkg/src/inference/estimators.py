import logging

import numpy as np

from inference.conjugacy import detect_conjugacy, has_linear_gaussian_likelihood
from inference.linear_gaussian import linear_gaussian_system, solve_system
from utilities.errors import CapabilityError, DomainError

logger = logging.getLogger(__name__)

# Gradient ascent settings for posteriors without a closed-form mode
ARMIJO_C = 1e-4
GRADIENT_TOLERANCE = 1e-6
MAX_ITERATIONS = 10_000
MIN_STEP = 1e-30
ML_CGLS_MAX_ITER = 200


def _safe(function, x):
    try:
        value = function(x)
    except DomainError:
        return -np.inf
    return value if np.isfinite(value) else -np.inf


def gradient_ascent(function, gradient, x0, tol=GRADIENT_TOLERANCE, max_iter=MAX_ITERATIONS):
    """
    Maximize a function by steepest ascent with Armijo backtracking (step halving).

    :param {callable} function: Objective to maximize
    :param {callable} gradient: Its gradient
    :param {np.ndarray} x0: Starting point with a finite objective
    :return: {tuple} (argmax, iterations, converged)
    """
    x = np.array(x0, dtype=float)
    value = _safe(function, x)
    if not np.isfinite(value):
        raise DomainError("Gradient ascent needs a starting point with finite objective")
    step = 1.0
    for iteration in range(max_iter):
        g = gradient(x)
        norm_sq = float(g @ g)
        if np.sqrt(norm_sq) < tol:
            return x, iteration, True
        # Allow the step to grow again after a run of accepted full steps
        step = min(2.0 * step, 1e12)
        while step > MIN_STEP:
            candidate = x + step * g
            candidate_value = _safe(function, candidate)
            if candidate_value >= value + ARMIJO_C * step * norm_sq:
                break
            step *= 0.5
        else:
            logger.debug("Line search failed at iteration %s", iteration)
            return x, iteration, False
        x, value = candidate, candidate_value
    return x, max_iter, False


def _linear_gaussian_case(posterior):
    if len(posterior.targets) != 1:
        return False
    descriptor = detect_conjugacy(posterior, posterior.targets[0])
    return descriptor is not None and descriptor.family == "Gaussian"


def map_estimate(posterior, x0=None, cgls_max_iter=1000, cgls_tol=1e-6):
    """
    Maximum a posteriori point.

    Linear-Gaussian posteriors are solved with CGLS on the whitened stacked system; other
    differentiable posteriors by gradient ascent.

    :param {Posterior} posterior: Target
    :param {np.ndarray} x0: Starting point for gradient ascent; defaults to the initial point
    :return: {dict} name -> MAP value
    """
    if _linear_gaussian_case(posterior):
        system = linear_gaussian_system(posterior)
        if not system.likelihood:
            return posterior.unflatten(system.prior_mean)
        result = solve_system(system, max_iter=cgls_max_iter, tol=cgls_tol)
        logger.info("MAP by CGLS: %s iterations, converged=%s", result.iterations, result.converged)
        return posterior.unflatten(result.x)
    if not posterior.has_gradient:
        raise CapabilityError("MAP estimation needs a linear-Gaussian or differentiable posterior")
    start = posterior.initial_point() if x0 is None else posterior.flatten(x0) if isinstance(x0, dict) else x0
    x, iterations, converged = gradient_ascent(posterior.logpdf, posterior.gradient, start)
    logger.info("MAP by gradient ascent: %s iterations, converged=%s", iterations, converged)
    return posterior.unflatten(x)


def ml_estimate(posterior, x0=None, cgls_max_iter=ML_CGLS_MAX_ITER, cgls_tol=1e-6):
    """
    Maximum likelihood point, ignoring the prior.

    For linear Gaussian likelihoods the CGLS iteration cap acts as regularization.

    :return: {dict} name -> ML value
    """
    if len(posterior.targets) == 1 and has_linear_gaussian_likelihood(posterior, posterior.targets[0]) \
            and posterior.likelihood_terms():
        system = linear_gaussian_system(posterior, require_gaussian_prior=False)
        result = solve_system(system, max_iter=cgls_max_iter, tol=cgls_tol,
                              operator=system.likelihood_operator(), rhs=system.likelihood_rhs())
        return posterior.unflatten(result.x)
    if not posterior.likelihood_terms():
        raise CapabilityError("Maximum likelihood needs observed data")
    start = posterior.initial_point() if x0 is None else posterior.flatten(x0) if isinstance(x0, dict) else x0
    x, iterations, converged = gradient_ascent(posterior.log_likelihood, posterior.gradient_log_likelihood, start)
    logger.info("ML by gradient ascent: %s iterations, converged=%s", iterations, converged)
    return posterior.unflatten(x)
