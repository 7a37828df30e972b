# Writes plot-ready statistics of a Samples object as header-free CSV payloads with JSON sidecars.
#
# File names follow <run-id>.<variable>.<statistic>.csv; the sidecar has the same stem and a .json
# suffix and records geometry, provenance, statistic and the meaning of the CSV columns.

import json
import logging
import os

import numpy as np
import pandas as pd
from scipy.stats import gaussian_kde

from samples.samples import DEFAULT_CI_LEVEL, Samples
from utilities.geometry import geometry_from_dict

logger = logging.getLogger(__name__)

STATISTICS = ("mean", "std", "ci", "trace", "violin", "raw")
VIOLIN_PERCENTILES = (1, 5, 25, 50, 75, 95, 99)
VIOLIN_GRID_POINTS = 128
FLOAT_FORMAT = "%.17g"


def export_path(directory, run_id, variable, statistic, suffix="csv"):
    return os.path.join(directory, f"{run_id}.{variable}.{statistic}.{suffix}")


def export(samples, what, directory, run_id="run", variable=None, level=DEFAULT_CI_LEVEL):
    """
    Write one statistic of the samples.

    :param {Samples} samples: Draws to summarize
    :param {str} what: One of mean, std, ci, trace, violin, raw
    :param {str} directory: Output directory, created if missing
    :param {str} run_id: Run identifier used as file name prefix
    :param {str} variable: Variable name; defaults to samples.name
    :param {float} level: Credibility level in percent for 'ci'
    :return: {tuple} (csv path, json path)
    """
    if what not in STATISTICS:
        raise ValueError(f"Unknown statistic '{what}', expected one of {list(STATISTICS)}")
    variable = variable or samples.name or "x"
    payload, columns, extra = _PAYLOADS[what](samples, level)

    os.makedirs(directory, exist_ok=True)
    csv_path = export_path(directory, run_id, variable, what)
    json_path = export_path(directory, run_id, variable, what, suffix="json")
    pd.DataFrame(payload).to_csv(csv_path, header=False, index=False, float_format=FLOAT_FORMAT)

    sidecar = {
        "run_id": run_id,
        "variable": variable,
        "statistic": what,
        "columns": columns,
        "rows": int(payload.shape[0]),
        "geometry": samples.geometry.to_dict(),
        "provenance": samples.provenance,
        "n_samples": samples.n_samples,
    }
    sidecar.update(extra)
    with open(json_path, "w") as file:
        json.dump(sidecar, file, indent=2, default=_json_default)
    logger.debug("Wrote %s", csv_path)
    return csv_path, json_path


def export_all(samples, directory, run_id="run", variable=None, statistics=STATISTICS, level=DEFAULT_CI_LEVEL):
    return [export(samples, what, directory, run_id, variable, level) for what in statistics]


def load_samples(csv_path):
    """
    Read a raw export back into Samples. The draws are reproduced bit-exactly.

    :param {str} csv_path: Path of a <run-id>.<variable>.raw.csv file
    :return: {Samples}
    """
    draws = pd.read_csv(csv_path, header=None, float_precision="round_trip").to_numpy(dtype=float)
    json_path = os.path.splitext(csv_path)[0] + ".json"
    geometry, name, provenance = None, None, {}
    if os.path.exists(json_path):
        with open(json_path) as file:
            sidecar = json.load(file)
        geometry = geometry_from_dict(sidecar["geometry"])
        name = sidecar.get("variable")
        provenance = sidecar.get("provenance", {})
    return Samples(draws, geometry, name, provenance)


def _mean_payload(samples, level):
    return samples.mean().reshape(-1, 1), ["mean"], {}


def _std_payload(samples, level):
    return samples.std().reshape(-1, 1), ["std"], {}


def _ci_payload(samples, level):
    lower, upper = samples.credibility_interval(level)
    return np.column_stack([lower, samples.mean(), upper]), ["lower", "mean", "upper"], {"level": level}


def _trace_payload(samples, level):
    index = np.arange(samples.n_samples, dtype=float).reshape(-1, 1)
    return np.hstack([index, samples.draws]), ["index"] + samples.variable_names(), {}


def _raw_payload(samples, level):
    return np.asarray(samples.draws), samples.variable_names(), {}


def _violin_payload(samples, level):
    rows = []
    for i in range(samples.dim):
        chain = samples.draws[:, i]
        quantiles = np.percentile(chain, VIOLIN_PERCENTILES)
        rows.append(np.concatenate([quantiles, *_kernel_density(chain)]))
    columns = ([f"p{p}" for p in VIOLIN_PERCENTILES] + [f"grid{j}" for j in range(VIOLIN_GRID_POINTS)]
               + [f"density{j}" for j in range(VIOLIN_GRID_POINTS)])
    extra = {"percentiles": list(VIOLIN_PERCENTILES), "grid_points": VIOLIN_GRID_POINTS,
             "kernel": "gaussian", "bandwidth": "silverman"}
    return np.array(rows), columns, extra


def _kernel_density(chain):
    low, high = chain.min(), chain.max()
    if high == low or len(chain) < 2:
        # A degenerate chain has no density; report its value on a flat grid
        return np.full(VIOLIN_GRID_POINTS, low), np.zeros(VIOLIN_GRID_POINTS)
    grid = np.linspace(low, high, VIOLIN_GRID_POINTS)
    return grid, gaussian_kde(chain, bw_method="silverman")(grid)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


_PAYLOADS = {
    "mean": _mean_payload,
    "std": _std_payload,
    "ci": _ci_payload,
    "trace": _trace_payload,
    "violin": _violin_payload,
    "raw": _raw_payload,
}
