# Convergence diagnostics for MCMC chains: autocorrelation, integrated autocorrelation time,
# effective sample size and split R-hat.

import numpy as np
import scipy.fft

from utilities.errors import DimensionError

# Chains shorter than this give meaningless autocorrelation estimates
MIN_IACT_LENGTH = 10
MIN_RHAT_LENGTH = 4


def _scalar_chain(chain):
    values = np.asarray(getattr(chain, "draws", chain), dtype=float)
    if values.ndim == 2:
        if values.shape[1] != 1:
            raise DimensionError("scalar chain", "N x 1 draws", values.shape)
        values = values[:, 0]
    if values.ndim != 1:
        raise DimensionError("scalar chain", "1D array", values.shape)
    return values


def autocorrelation(chain, max_lag=None):
    """
    Normalized autocorrelation rho(0..max_lag) of a scalar chain.

    Uses the biased autocovariance (divisor N) of the mean-removed chain, computed with an FFT.

    :param chain: 1D array or scalar Samples
    :param {int} max_lag: Largest lag returned; defaults to N - 1
    :return: {np.ndarray}
    """
    values = _scalar_chain(chain)
    n = len(values)
    centred = values - values.mean()
    size = scipy.fft.next_fast_len(2 * n)
    spectrum = scipy.fft.rfft(centred, size)
    autocovariance = scipy.fft.irfft(spectrum * np.conj(spectrum), size)[:n] / n
    if autocovariance[0] <= 0:
        raise ValueError("Autocorrelation is undefined for a constant chain")
    max_lag = n - 1 if max_lag is None else min(int(max_lag), n - 1)
    return autocovariance[:max_lag + 1] / autocovariance[0]


def iact(chain):
    """
    Integrated autocorrelation time tau = 1 + 2 sum rho(l).

    The sum is truncated with Geyer's initial positive sequence: pairs rho(2k) + rho(2k+1) are
    added while they stay positive. tau is clamped below at 1/N so the ESS stays finite on
    antithetic chains.

    :param chain: 1D array or scalar Samples with at least 10 draws
    :return: {float}
    """
    values = _scalar_chain(chain)
    n = len(values)
    if n < MIN_IACT_LENGTH:
        raise ValueError(f"IACT needs at least {MIN_IACT_LENGTH} draws, got {n}")
    if np.ptp(values) == 0:
        raise ValueError("IACT is undefined for a zero-variance chain")
    rho = autocorrelation(values)
    pair_sum = 0.0
    for k in range(n // 2):
        pair = rho[2 * k] + rho[2 * k + 1]
        if pair <= 0:
            break
        pair_sum += pair
    tau = -1.0 + 2.0 * pair_sum
    return max(tau, 1.0 / n)


def ess(chain):
    return len(_scalar_chain(chain)) / iact(chain)


def rhat(chains):
    """
    Split R-hat of two or more scalar chains of equal length.

    Each chain is split in halves (the middle draw of odd-length chains is dropped) and the
    classic sqrt(V / W) potential scale reduction is computed over the halves.

    :param {list} chains: 1D arrays or scalar Samples
    :return: {float}
    """
    chains = [_scalar_chain(chain) for chain in chains]
    if len(chains) < 2:
        raise ValueError(f"R-hat needs at least 2 chains, got {len(chains)}")
    lengths = {len(chain) for chain in chains}
    if len(lengths) != 1:
        raise ValueError(f"R-hat needs chains of equal length, got lengths {sorted(lengths)}")
    n = lengths.pop()
    if n < MIN_RHAT_LENGTH:
        raise ValueError(f"R-hat needs chains of at least {MIN_RHAT_LENGTH} draws, got {n}")

    half = n // 2
    halves = np.array([part for chain in chains for part in (chain[:half], chain[n - half:])])
    within = np.mean(np.var(halves, axis=1, ddof=1))
    between = half * np.var(np.mean(halves, axis=1), ddof=1)
    if within == 0:
        return 1.0 if between == 0 else np.inf
    pooled = (half - 1) / half * within + between / half
    return float(np.sqrt(pooled / within))


def rhat_per_coordinate(chains):
    """Split R-hat for each coordinate of multivariate chains (Samples or N x dim arrays)."""
    arrays = [np.asarray(getattr(chain, "draws", chain), dtype=float) for chain in chains]
    arrays = [array.reshape(len(array), -1) for array in arrays]
    dims = {array.shape[1] for array in arrays}
    if len(dims) != 1:
        raise DimensionError("R-hat chains", "equal dimensions", sorted(dims))
    return np.array([rhat([array[:, i] for array in arrays]) for i in range(dims.pop())])
