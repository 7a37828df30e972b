# Hierarchical model of coaching effects in eight schools, written through standardized effects xp:
#   u ~ N(0, 10^2), t ~ LogNormal(5, 1), xp ~ N(0, I_8), x = u + t * xp, y ~ N(x, diag(s_obs)^2)

import numpy as np

from distributions import Gaussian, Lognormal
from inference.joint_distribution import Deterministic
from testproblems.test_problem_bundle import DATA_VARIABLE, TestProblemBundle
from utilities.deferred import Deferred

Y_OBS = np.array([28.0, 8.0, -3.0, 7.0, -1.0, 1.0, 18.0, 12.0])
S_OBS = np.array([15.0, 10.0, 16.0, 11.0, 9.0, 11.0, 10.0, 18.0])
N_SCHOOLS = 8


def school_effects(u, t, xp):
    return u + t * np.asarray(xp)


def school_effects_vjp(g, u, t, xp):
    return {"u": float(np.sum(g)), "t": float(g @ np.asarray(xp)), "xp": t * g}


def eight_schools():
    """
    The eight schools joint distribution with its observed effects.

    Sampling targets are u, t and xp; x is a deterministic node with an exact vector-Jacobian
    product so joint gradients need no numerical differentiation.

    :return: {TestProblemBundle} .joint and .data give the joint distribution and {"y": y_obs}
    """
    u = Gaussian(0.0, 100.0, name="u")
    t = Lognormal(5.0, 1.0, name="t")
    xp = Gaussian(np.zeros(N_SCHOOLS), 1.0, name="xp")
    y = Gaussian(Deferred.identity("x"), sqrtcov=S_OBS.copy(), name=DATA_VARIABLE)
    effects = Deterministic("x", school_effects, ("u", "t", "xp"), vjp=school_effects_vjp)
    info = {"exactSolution": None, "exactData": None, "s_obs": S_OBS.copy(),
            "noise": {"type": "gaussian", "std": S_OBS.tolist()}, "seed": None}
    return TestProblemBundle(None, Y_OBS.copy(), info, (y, u, t, xp), (effects,))
