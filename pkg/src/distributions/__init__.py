from distributions.distribution import Distribution, condition, grad_logpdf, logpdf, sample_direct
from distributions.gaussian import Gaussian, GaussianPrecision
from distributions.mrf import CMRF, GMRF, LMRF, MarkovRandomField
from distributions.univariate import Gamma, Lognormal, Uniform
from distributions.user_defined import UserDefined

FAMILIES = {
    "Gaussian": Gaussian,
    "Gamma": Gamma,
    "Lognormal": Lognormal,
    "Uniform": Uniform,
    "GMRF": GMRF,
    "LMRF": LMRF,
    "CMRF": CMRF,
}
