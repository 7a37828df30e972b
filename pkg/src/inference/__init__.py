from inference.bayesian_problem import BayesianProblem, pooled_samples
from inference.conjugacy import ConjugacyDescriptor, detect_conjugacy
from inference.estimators import gradient_ascent, map_estimate, ml_estimate
from inference.joint_distribution import Deterministic, JointDistribution, condition_joint, joint_logpdf
from inference.linear_gaussian import gaussian_posterior, linear_gaussian_system
from inference.posterior import Posterior
from inference.sampler_selection import SamplingPlan, select_sampler
