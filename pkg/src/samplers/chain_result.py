from dataclasses import dataclass, field

import numpy as np


@dataclass
class ChainResult:
    """
    Output of one chain: post burn-in Samples per variable plus run diagnostics.

    acceptance_rate is a float for single samplers and a dict (variable -> rate) for Gibbs.
    """
    samples: dict
    acceptance_rate: object
    sampler: str
    seed: object = None
    wall_time: float = 0.0
    adaptation_trace: list = field(default_factory=list)
    divergences: int = 0
    n_evaluations: int = 0
    n_burn_in: int = 0

    def __getitem__(self, name):
        return self.samples[name]

    @property
    def variables(self):
        return list(self.samples)

    @property
    def n_samples(self):
        return next(iter(self.samples.values())).n_samples

    def mean_acceptance(self):
        if isinstance(self.acceptance_rate, dict):
            return float(np.mean(list(self.acceptance_rate.values())))
        return float(self.acceptance_rate)

    def summary(self):
        """Run metadata without the draws, JSON serializable."""
        acceptance = self.acceptance_rate
        if isinstance(acceptance, dict):
            acceptance = {name: float(rate) for name, rate in acceptance.items()}
        else:
            acceptance = float(acceptance)
        return {
            "sampler": self.sampler,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "n_burn_in": self.n_burn_in,
            "acceptance_rate": acceptance,
            "divergences": int(self.divergences),
            "n_evaluations": int(self.n_evaluations),
        }
