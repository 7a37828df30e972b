from dataclasses import dataclass
import logging

from distributions import LMRF
from inference.conjugacy import detect_conjugacy, has_linear_gaussian_likelihood

logger = logging.getLogger(__name__)

# Random-walk MH is used up to this dimension, component-wise MH above it
MH_MAX_DIM = 10


@dataclass(frozen=True)
class SamplingPlan:
    """
    Which sampler updates which variable.

    strategy is "single" (one sampler for the whole target, named in per_variable under every
    variable) or "gibbs" (systematic sweep, one sampler per variable).
    """
    strategy: str
    per_variable: tuple

    @property
    def variables(self):
        return [name for name, _ in self.per_variable]

    def sampler_for(self, name):
        return dict(self.per_variable)[name]

    @property
    def sampler(self):
        """The sampler name of a single-sampler plan."""
        if self.strategy != "single":
            raise ValueError("A Gibbs plan has one sampler per variable")
        return self.per_variable[0][1]

    def describe(self):
        lines = ["Automatically determined sampling strategy:"]
        if self.strategy == "gibbs":
            lines.insert(0, "Using Gibbs sampler")
        lines += [f"  {name}: {sampler}" for name, sampler in self.per_variable]
        return "\n".join(lines)

    def to_dict(self):
        return {"strategy": self.strategy, "samplers": dict(self.per_variable)}

    @classmethod
    def single(cls, sampler, variables):
        return cls("single", tuple((name, sampler) for name in variables))

    @classmethod
    def gibbs(cls, assignment):
        return cls("gibbs", tuple(assignment.items()))


def select_for_variable(posterior, name):
    """
    Decision table for one target, with every other target treated as fixed.

    :return: {str} sampler name
    """
    conditional = posterior if len(posterior.targets) == 1 else posterior.conditional(name, posterior.initial_point())
    prior = posterior.joint[name]
    descriptor = detect_conjugacy(conditional, name)
    if descriptor is not None and descriptor.family == "Gaussian":
        return "LinearRTO"
    if isinstance(prior, LMRF) and not _location_deferred(prior) and conditional.likelihood_terms() \
            and has_linear_gaussian_likelihood(conditional, name):
        return "UGLA"
    if descriptor is not None:
        return "Conjugate" if descriptor.exact else "ConjugateApprox"
    if conditional.has_gradient:
        return "NUTS"
    return "MH" if conditional.dim_of(name) <= MH_MAX_DIM else "CWMH"


def _location_deferred(prior):
    return hasattr(prior.parameter("location"), "bind")


def select_sampler(posterior):
    """
    Choose a sampling plan from the structure of the posterior.

    Per target the rules are tried in order: LinearRTO for linear-Gaussian conditionals, UGLA for an
    LMRF prior with a linear Gaussian likelihood, Conjugate / ConjugateApprox for recognized Gamma
    conditionals, NUTS when gradients are available and MH (at most 10 dimensions) or CWMH
    otherwise. Several targets give a Gibbs plan, except when every target would use NUTS: then
    one NUTS sampler runs on the joint target.

    :param {Posterior} posterior: Target
    :return: {SamplingPlan}
    """
    assignment = {name: select_for_variable(posterior, name) for name in posterior.targets}
    if len(assignment) == 1:
        plan = SamplingPlan.single(next(iter(assignment.values())), posterior.targets)
    elif all(sampler == "NUTS" for sampler in assignment.values()) and posterior.has_gradient:
        plan = SamplingPlan.single("NUTS", posterior.targets)
    else:
        plan = SamplingPlan.gibbs(assignment)
    logger.info(plan.describe())
    return plan
