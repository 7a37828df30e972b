from samplers.conjugate import Conjugate, ConjugateApprox
from samplers.gibbs import Gibbs
from samplers.langevin import MALA, ULA
from samplers.metropolis import CWMH, MH
from samplers.nuts import NUTS
from samplers.pcn import PCN
from samplers.rto import UGLA, LinearRTO
from samplers.sampler_config import SamplerConfig

SAMPLERS = {
    "MH": MH,
    "CWMH": CWMH,
    "pCN": PCN,
    "ULA": ULA,
    "MALA": MALA,
    "NUTS": NUTS,
    "LinearRTO": LinearRTO,
    "UGLA": UGLA,
    "Conjugate": Conjugate,
    "ConjugateApprox": ConjugateApprox,
}


def create_sampler(kind, target, config=None):
    """
    Instantiate a single-variable-or-joint sampler by name.

    :param {str} kind: One of SAMPLERS
    :param {Posterior} target: Sampling target
    :param {SamplerConfig} config: Options; defaults for the kind when omitted
    :return: {Sampler}
    """
    if kind not in SAMPLERS:
        raise ValueError(f"Unknown sampler '{kind}', expected one of {sorted(SAMPLERS)} or Gibbs")
    if config is None:
        config = SamplerConfig(kind=kind)
    elif config.kind != kind:
        config = config.with_kind(kind)
    return SAMPLERS[kind](target, config)


def sampler_for_plan(posterior, plan, configs=None):
    """
    The sampler that executes a SamplingPlan.

    :param {dict} configs: variable -> SamplerConfig (Gibbs) or "*" -> SamplerConfig (single)
    """
    configs = dict(configs or {})
    if plan.strategy == "single":
        return create_sampler(plan.sampler, posterior, configs.get("*"))
    shared = configs.pop("*", None)
    return Gibbs(posterior, plan, configs, shared.with_kind("Gibbs") if shared is not None else None)


def run_plan(posterior, plan, N, Nb=0, rng=None, configs=None, x0=None):
    return sampler_for_plan(posterior, plan, configs).sample(N, Nb, rng, x0)


def mh_sample(target, cfg, x0, N, Nb, rng):
    return MH(target, cfg).sample(N, Nb, rng, x0)


def cwmh_sample(target, cfg, x0, N, Nb, rng):
    return CWMH(target, cfg).sample(N, Nb, rng, x0)


def pcn_sample(target, cfg, x0, N, Nb, rng):
    return PCN(target, cfg).sample(N, Nb, rng, x0)


def ula_sample(target, cfg, x0, N, Nb, rng):
    return ULA(target, cfg).sample(N, Nb, rng, x0)


def mala_sample(target, cfg, x0, N, Nb, rng):
    return MALA(target, cfg).sample(N, Nb, rng, x0)


def nuts_sample(target, cfg, x0, N, Nb, rng):
    return NUTS(target, cfg).sample(N, Nb, rng, x0)


def linear_rto_sample(target, cfg, N, Nb, rng):
    return LinearRTO(target, cfg).sample(N, Nb, rng)


def ugla_sample(target, cfg, N, Nb, rng):
    return UGLA(target, cfg).sample(N, Nb, rng)


def gibbs_sample(post, plan, N, Nb, rng, configs=None):
    return Gibbs(post, plan, configs).sample(N, Nb, rng)
