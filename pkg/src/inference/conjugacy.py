# Structural recognition of conditionals that can be sampled in closed form.
#
# Recognition looks at distribution families and at the tags of deferred parameters, never at
# the deferred functions themselves:
#   Gamma prior on s, partner Gaussian(mean, prec=s) or Gaussian(mean, cov=1/s)  -> exact Gamma
#   Gamma prior on d, partner GMRF(mean, prec=d)                               -> exact Gamma
#   Gamma prior on d, partner LMRF(location, scale=1/d)                          -> approximate Gamma
#   Gaussian/GMRF prior on x, partners Gaussian(A x or x, fixed covariance)      -> Gaussian (linear RTO)

from dataclasses import dataclass

import numpy as np

from distributions import GMRF, LMRF, Gamma, Gaussian
from utilities.deferred import Deferred
from utilities.errors import CapabilityError

GAMMA_GAUSSIAN_PRECISION = "gamma_gaussian_precision"
GAMMA_GMRF_PRECISION = "gamma_gmrf_precision"
GAMMA_LMRF_INVERSE_SCALE = "gamma_lmrf_inverse_scale"
GAUSSIAN_LINEAR = "gaussian_linear"


@dataclass(frozen=True)
class ConjugacyDescriptor:
    variable: str
    family: str
    exact: bool
    partners: tuple
    relations: tuple

    @property
    def kind(self):
        return self.relations[0] if len(set(self.relations)) == 1 else "mixed"

    def gamma_conditional(self, posterior, point):
        """
        The Gamma conditional of the variable given the current values of everything else.

        :param {Posterior} posterior: Posterior containing the variable as a target
        :param point: Current values (dict or flat vector) of all targets
        :return: {Gamma}
        """
        if self.family != "Gamma":
            raise CapabilityError(f"'{self.variable}' has a {self.family} conditional, not a Gamma one")
        values = posterior._values(point)
        values = {name: value for name, value in values.items() if name != self.variable}
        prior = posterior.joint[self.variable].bind_from(values)
        shape, rate = float(prior.value_of("shape")), float(prior.value_of("rate"))
        for partner, relation in zip(self.partners, self.relations):
            # Evaluating the partner at unit precision leaves only the structural part
            dist = posterior.joint[partner].bind_from({**values, self.variable: 1.0})
            observed = np.atleast_1d(np.asarray(values[partner], dtype=float))
            if relation == GAMMA_GAUSSIAN_PRECISION:
                residual = observed - dist.mean_vector()
                shape += 0.5 * dist.dim
                rate += 0.5 * float(residual @ dist.precision_apply(residual))
            elif relation == GAMMA_GMRF_PRECISION:
                shape += 0.5 * dist.dim
                rate += 0.5 * dist.quadratic_form(observed)
            else:
                shape += dist.n_difference_terms
                rate += dist.total_variation(observed)
        return Gamma(shape, rate, name=self.variable)


def _single_tag(param, variable, tag):
    return isinstance(param, Deferred) and param.tag == tag and param.depends_on == (variable,)


def _depends_on(param, variable):
    return isinstance(param, Deferred) and variable in param.depends_on


def _gamma_relation(dist, variable):
    """How a partner density depends on a Gamma distributed variable, or None."""
    if isinstance(dist, Gaussian):
        if _depends_on(dist.mean, variable):
            return None
        cov = dist.covariance_parameter
        if dist.parameterization == "prec" and _single_tag(cov, variable, "identity"):
            return GAMMA_GAUSSIAN_PRECISION
        if dist.parameterization == "cov" and _single_tag(cov, variable, "reciprocal"):
            return GAMMA_GAUSSIAN_PRECISION
        return None
    if isinstance(dist, GMRF):
        if not _depends_on(dist.mean, variable) and _single_tag(dist.parameter("prec"), variable, "identity"):
            return GAMMA_GMRF_PRECISION
        return None
    if isinstance(dist, LMRF):
        location = dist.parameter("location")
        if not _depends_on(location, variable) and _single_tag(dist.parameter("scale"), variable, "reciprocal"):
            return GAMMA_LMRF_INVERSE_SCALE
    return None


def linear_partner(dist, variable):
    """
    The linear model through which a Gaussian partner observes `variable`, or None.

    :return: {LinearModel|str|None} a LinearModel, "identity" for mean = variable, or None
    """
    if not isinstance(dist, Gaussian):
        return None
    mean = dist.mean
    if not isinstance(mean, Deferred) or mean.depends_on != (variable,):
        return None
    if _depends_on(dist.covariance_parameter, variable):
        return None
    if mean.tag == "identity":
        return "identity"
    if mean.tag == "model" and getattr(mean.model, "kind", None) == "linear":
        return mean.model
    return None


def _partners(posterior, variable):
    joint = posterior.joint
    if joint.feeds_deterministic(variable):
        return None
    return [name for name in joint.dependents(variable) if name in posterior.active]


def gaussian_prior_usable(prior, variable):
    """A Gaussian or GMRF prior whose parameters do not depend on the variable itself."""
    if not getattr(prior, "is_gaussian", False):
        return False
    return all(not _depends_on(value, variable) for value in prior.parameters.values()) and \
        not any(isinstance(value, Deferred) and key in ("mean", "location") for key, value in prior.parameters.items())


def has_linear_gaussian_likelihood(posterior, variable):
    partners = _partners(posterior, variable)
    if partners is None:
        return False
    return all(linear_partner(posterior.joint[name], variable) is not None for name in partners)


def detect_conjugacy(posterior, variable):
    """
    Recognize a closed-form (or approximately closed-form) conditional for one target.

    :param {Posterior} posterior: Posterior containing the variable as a target
    :param {str} variable: Target variable name
    :return: {ConjugacyDescriptor|None}
    """
    if variable not in posterior.targets:
        raise ValueError(f"'{variable}' is not a target of the posterior")
    prior = posterior.joint[variable]
    partners = _partners(posterior, variable)
    if partners is None:
        return None

    if gaussian_prior_usable(prior, variable) and has_linear_gaussian_likelihood(posterior, variable):
        return ConjugacyDescriptor(variable, "Gaussian", True, tuple(partners), (GAUSSIAN_LINEAR,) * len(partners))

    if isinstance(prior, Gamma) and not prior.conditioning_variables and partners:
        relations = [_gamma_relation(posterior.joint[name], variable) for name in partners]
        if any(relation is None for relation in relations):
            return None
        exact = GAMMA_LMRF_INVERSE_SCALE not in relations
        return ConjugacyDescriptor(variable, "Gamma", exact, tuple(partners), tuple(relations))
    return None
