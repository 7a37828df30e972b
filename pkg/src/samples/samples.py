import numpy as np
import pandas as pd

from samples import diagnostics
from utilities.errors import DimensionError
from utilities.geometry import Geometry, default_geometry

DEFAULT_CI_LEVEL = 95


class Samples:
    """
    Draws of one variable, one row per draw, with the geometry of the variable attached.

    Samples are read-only; thin and burn return new objects.
    """

    def __init__(self, draws, geometry=None, name=None, provenance=None):
        """
        :param {np.ndarray} draws: N x par_dim array (a 1D array is taken as N scalar draws)
        :param {Geometry} geometry: Geometry of the variable; defaults to Continuous1D(par_dim)
        :param {str} name: Variable name
        :param {dict} provenance: Sampler name, seed and similar metadata
        """
        draws = np.array(draws, dtype=float)
        if draws.ndim == 1:
            draws = draws.reshape(-1, 1)
        if draws.ndim != 2:
            raise DimensionError("Samples draws", "N x par_dim array", draws.shape)
        if geometry is None:
            geometry = default_geometry(draws.shape[1])
        if not isinstance(geometry, Geometry):
            raise TypeError(f"geometry must be a Geometry, got {type(geometry).__name__}")
        if draws.shape[1] != geometry.par_dim:
            raise DimensionError("Samples draws", (draws.shape[0], geometry.par_dim), draws.shape)
        draws.setflags(write=False)
        self.draws = draws
        self.geometry = geometry
        self.name = name
        self.provenance = dict(provenance or {})

    @property
    def n_samples(self):
        return self.draws.shape[0]

    @property
    def dim(self):
        return self.draws.shape[1]

    def __len__(self):
        return self.n_samples

    def variable_names(self):
        return self.geometry.variable_names()

    def _require(self, minimum, what):
        if self.n_samples < minimum:
            raise ValueError(f"{what} needs at least {minimum} draws, got {self.n_samples}")

    def _derived(self, draws, **provenance):
        return Samples(draws, self.geometry, self.name, dict(self.provenance, **provenance))

    # ---------------------------------------------------------------- statistics

    def mean(self):
        self._require(1, "mean")
        return self.draws.mean(axis=0)

    def std(self):
        self._require(2, "std")
        return self.draws.std(axis=0, ddof=1)

    def variance(self):
        self._require(2, "variance")
        return self.draws.var(axis=0, ddof=1)

    def quantile(self, q):
        """Empirical quantiles with linear interpolation between order statistics, position (N-1) q."""
        self._require(1, "quantile")
        return np.quantile(self.draws, q, axis=0)

    def credibility_interval(self, level=DEFAULT_CI_LEVEL):
        """
        Equal-tailed credibility interval.

        :param {float} level: Percent, in (0, 100)
        :return: {tuple} (lower, upper) vectors
        """
        if not 0 < level < 100:
            raise ValueError(f"Credibility level must be in (0, 100), got {level}")
        self._require(2, "credibility_interval")
        tail = (1.0 - level / 100.0) / 2.0
        lower, upper = self.quantile([tail, 1.0 - tail])
        return lower, upper

    def compute_iact(self):
        return np.array([diagnostics.iact(self.draws[:, i]) for i in range(self.dim)])

    def compute_ess(self):
        return np.array([diagnostics.ess(self.draws[:, i]) for i in range(self.dim)])

    def autocorrelation(self, max_lag=None):
        """Autocorrelation per coordinate, (max_lag + 1) x par_dim."""
        return np.column_stack([diagnostics.autocorrelation(self.draws[:, i], max_lag) for i in range(self.dim)])

    def correlation(self):
        """Correlation matrix between coordinates."""
        self._require(2, "correlation")
        return np.atleast_2d(np.corrcoef(self.draws, rowvar=False))

    # ---------------------------------------------------------------- slicing

    def thin(self, k):
        if int(k) != k or k < 1:
            raise ValueError(f"Thinning factor must be a positive integer, got {k}")
        return self._derived(self.draws[::int(k)], thinned=int(k) * self.provenance.get("thinned", 1))

    def burn(self, k):
        if int(k) != k or not 0 <= k < self.n_samples:
            raise ValueError(f"Burn-in must be in [0, {self.n_samples}), got {k}")
        return self._derived(self.draws[int(k):])

    def coordinate(self, index):
        """Scalar Samples of one coordinate, by position or label."""
        if isinstance(index, str):
            index = self.variable_names().index(index)
        return Samples(self.draws[:, index], None, f"{self.name}[{index}]", self.provenance)

    # ---------------------------------------------------------------- tables

    def to_frame(self):
        return pd.DataFrame(self.draws, columns=self.variable_names())

    def summary(self, level=DEFAULT_CI_LEVEL):
        """Per-coordinate table of mean, std, credibility bounds and ESS."""
        lower, upper = self.credibility_interval(level)
        table = pd.DataFrame({"mean": self.mean(), "std": self.std(), "lower": lower, "upper": upper},
                             index=self.variable_names())
        table["ess"] = self._ess_or_nan()
        return table

    def _ess_or_nan(self):
        values = []
        for i in range(self.dim):
            try:
                values.append(diagnostics.ess(self.draws[:, i]))
            except ValueError:
                values.append(np.nan)
        return values

    def __repr__(self):
        return f"Samples(name={self.name!r}, n_samples={self.n_samples}, geometry={self.geometry!r})"


def stack_chains(chains):
    """Concatenate the draws of several chains of the same variable."""
    if not chains:
        raise ValueError("No chains to stack")
    first = chains[0]
    return Samples(np.vstack([chain.draws for chain in chains]), first.geometry, first.name,
                   dict(first.provenance, chains=len(chains)))
