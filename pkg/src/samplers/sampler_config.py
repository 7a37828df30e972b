from dataclasses import asdict, dataclass, fields

SAMPLER_KINDS = ("MH", "CWMH", "pCN", "ULA", "MALA", "NUTS", "LinearRTO", "UGLA", "Conjugate", "ConjugateApprox",
                 "Gibbs")


@dataclass(frozen=True)
class SamplerConfig:
    """
    Options shared by all samplers; each sampler reads the fields that apply to it.

    scale: MH / CWMH proposal standard deviation (0 gives a constant chain)
    step_size: ULA / MALA step h, NUTS initial step (None lets NUTS search for one)
    pcn_step: pCN step s in (0, 1]
    inner_steps: Steps per Gibbs sweep; None uses the sampler default
    """
    kind: str = "MH"
    scale: float = 1.0
    step_size: float = None
    pcn_step: float = 0.2
    target_accept: float = 0.8
    max_depth: int = 10
    cgls_max_iter: int = 1000
    cgls_tol: float = 1e-6
    ugla_beta: float = 1e-4
    adapt: bool = True
    inner_steps: int = None

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"Unknown sampler kind '{self.kind}', expected one of {list(SAMPLER_KINDS)}")
        if self.scale < 0:
            raise ValueError(f"Proposal scale must be non-negative, got {self.scale}")
        if self.step_size is not None and self.step_size <= 0:
            raise ValueError(f"Step size h must be positive, got {self.step_size}")
        if not 0 < self.pcn_step <= 1:
            raise ValueError(f"pCN step s must be in (0, 1], got {self.pcn_step}")
        if not 0 < self.target_accept < 1:
            raise ValueError(f"Target acceptance rate must be in (0, 1), got {self.target_accept}")
        if self.max_depth < 1:
            raise ValueError(f"NUTS max tree depth must be at least 1, got {self.max_depth}")
        if self.cgls_max_iter < 1 or self.cgls_tol <= 0:
            raise ValueError(f"CGLS needs max_iter >= 1 and tol > 0, got {self.cgls_max_iter}, {self.cgls_tol}")
        if self.ugla_beta <= 0:
            raise ValueError(f"UGLA smoothing beta must be positive, got {self.ugla_beta}")
        if self.inner_steps is not None and self.inner_steps < 1:
            raise ValueError(f"Gibbs inner steps must be at least 1, got {self.inner_steps}")

    @classmethod
    def from_dict(cls, options):
        """Build from a plain dict; unknown keys are an error."""
        names = {field.name for field in fields(cls)}
        unknown = sorted(set(options) - names)
        if unknown:
            raise ValueError(f"Unknown sampler options {unknown}, expected some of {sorted(names)}")
        return cls(**options)

    def with_kind(self, kind):
        return SamplerConfig(**dict(asdict(self), kind=kind))

    def to_dict(self):
        return asdict(self)
