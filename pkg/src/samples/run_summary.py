# Per-variable summaries pooled over the chains of a run, and per-chain diagnostic payloads.

import numpy as np
import pandas as pd

from samples import diagnostics
from samples.samples import DEFAULT_CI_LEVEL, stack_chains

SUMMARY_COLUMNS = ("mean", "std", "lower", "upper", "ess", "rhat")
ACF_MAX_LAG = 100


def _finite_or_none(values):
    return [float(value) if np.isfinite(value) else None for value in np.asarray(values, dtype=float)]


def _chain_ess(chain):
    try:
        return diagnostics.ess(chain)
    except ValueError:
        return np.nan


def summarize_chains(chains, level=DEFAULT_CI_LEVEL):
    """
    Summary of one variable over all chains of a run.

    ESS is summed over chains; split R-hat needs at least two chains and is None otherwise.
    Non-finite values (undefined ESS of a constant chain) are reported as None.

    :param {list} chains: Samples of the same variable, one per chain
    :param {float} level: Credibility level in percent
    :return: {dict} labels, mean, std, lower, upper, ess, rhat (lists, one entry per coordinate)
    """
    pooled = stack_chains(chains)
    lower, upper = pooled.credibility_interval(level)
    ess = np.zeros(pooled.dim)
    for chain in chains:
        ess += [_chain_ess(chain.draws[:, i]) for i in range(chain.dim)]
    rhat = None
    if len(chains) > 1:
        try:
            rhat = _finite_or_none(diagnostics.rhat_per_coordinate(chains))
        except ValueError:
            rhat = [None] * pooled.dim
    return {
        "labels": pooled.variable_names(),
        "mean": _finite_or_none(pooled.mean()),
        "std": _finite_or_none(pooled.std()),
        "lower": _finite_or_none(lower),
        "upper": _finite_or_none(upper),
        "ess": _finite_or_none(ess),
        "rhat": rhat,
        "level": level,
        "n_chains": len(chains),
        "n_samples": pooled.n_samples,
    }


def summary_frame(summaries):
    """
    One row per scalar parameter: x[0], x[1], ... for vectors, the variable name for scalars.

    :param {dict} summaries: variable -> summarize_chains output
    :return: {pandas.DataFrame}
    """
    rows = []
    for variable, summary in summaries.items():
        labels = summary["labels"]
        for i, label in enumerate(labels):
            row = {"parameter": variable if len(labels) == 1 else f"{variable}[{label}]"}
            for column in SUMMARY_COLUMNS:
                values = summary[column]
                row[column] = values[i] if values is not None else None
            rows.append(row)
    return pd.DataFrame(rows, columns=("parameter",) + SUMMARY_COLUMNS).set_index("parameter")


def format_summary(summaries):
    """Fixed-width table; missing values (single-chain R-hat, undefined ESS) print as n/a."""
    frame = summary_frame(summaries).astype(object)
    formatted = frame.map(lambda value: "n/a" if value is None or pd.isna(value) else f"{value:.6g}")
    return formatted.to_string(justify="right")


def chain_diagnostics(samples, max_lag=ACF_MAX_LAG):
    """
    Autocorrelation (lags 0..max_lag) and IACT / ESS of every coordinate of one chain.

    A coordinate whose chain is constant is flagged degenerate; its autocorrelation is 1 at lag 0
    and its IACT / ESS are None. When every coordinate is degenerate only the lag-0 row is kept.

    :param {Samples} samples: One chain
    :return: {tuple} (acf array with a leading lag column, info dict)
    """
    max_lag = min(max_lag, samples.n_samples - 1)
    degenerate = [bool(np.ptp(samples.draws[:, i]) == 0) for i in range(samples.dim)]
    lags = 1 if all(degenerate) else max_lag + 1
    acf = np.zeros((lags, samples.dim))
    iact, ess = [], []
    for i in range(samples.dim):
        chain = samples.draws[:, i]
        if degenerate[i]:
            acf[0, i] = 1.0
            iact.append(None)
            ess.append(None)
            continue
        acf[:, i] = diagnostics.autocorrelation(chain, lags - 1)
        try:
            tau = diagnostics.iact(chain)
            iact.append(float(tau))
            ess.append(float(samples.n_samples / tau))
        except ValueError:
            iact.append(None)
            ess.append(None)
    info = {
        "labels": samples.variable_names(),
        "n_samples": samples.n_samples,
        "max_lag": lags - 1,
        "degenerate": all(degenerate),
        "degenerate_coordinates": degenerate,
        "iact": iact,
        "ess": ess,
    }
    return np.column_stack([np.arange(lags, dtype=float), acf]), info
