from samplers.chain_result import ChainResult
from samplers.conjugate import Conjugate, ConjugateApprox, conjugate_approx_step, conjugate_step
from samplers.gibbs import Gibbs
from samplers.langevin import MALA, ULA
from samplers.metropolis import CWMH, MH
from samplers.nuts import NUTS
from samplers.pcn import PCN
from samplers.registry import SAMPLERS, create_sampler, run_plan, sampler_for_plan
from samplers.rto import UGLA, LinearRTO
from samplers.sampler import Sampler
from samplers.sampler_config import SAMPLER_KINDS, SamplerConfig
