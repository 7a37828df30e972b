from dataclasses import dataclass, field
import json
import logging
import os

import numpy as np
import pandas as pd

from inference.bayesian_problem import BayesianProblem
from inference.joint_distribution import JointDistribution
from utilities.linalg import save_matrix_csv

logger = logging.getLogger(__name__)

DATA_VARIABLE = "y"


@dataclass(frozen=True)
class TestProblemBundle:
    """
    A forward model with observed data and the truth that generated it.

    info holds exactSolution, exactData, noise (a description dict) and seed; y_obs is
    exactData plus the noise realized under that seed. `distributions` are the densities the
    problem comes with (the data density, and for some problems the prior); problems without a
    prior leave its choice to the caller.
    """
    __test__ = False

    model: object
    y_obs: np.ndarray
    info: dict
    distributions: tuple = ()
    deterministic: tuple = field(default=())

    @property
    def exact_solution(self):
        return self.info.get("exactSolution")

    @property
    def exact_data(self):
        return self.info.get("exactData")

    @property
    def data(self):
        return {DATA_VARIABLE: self.y_obs}

    @property
    def joint(self):
        return JointDistribution(*self.distributions, deterministic=self.deterministic)

    def bayesian_problem(self, *priors):
        """BayesianProblem of the bundled densities plus any extra priors, with the data set."""
        problem = BayesianProblem(*self.distributions, *priors, deterministic=self.deterministic)
        return problem.set_data(**self.data)


def export_bundle(bundle, directory, name):
    """
    Write a bundle for command-line use: <name>.model.csv when the model is a matrix small
    enough to materialize, <name>.data.csv and <name>.info.json.

    :param {TestProblemBundle} bundle: Problem to export
    :param {str} directory: Output directory, created if missing
    :param {str} name: File name stem
    :return: {dict} kind -> written path
    """
    os.makedirs(directory, exist_ok=True)
    written = {}
    model = bundle.model
    if model is not None and getattr(model, "kind", None) == "linear":
        path = os.path.join(directory, f"{name}.model.csv")
        try:
            save_matrix_csv(path, model.operator)
            written["model"] = path
        except MemoryError as error:
            logger.warning("Model not exported: %s", error)

    data_path = os.path.join(directory, f"{name}.data.csv")
    pd.DataFrame(np.asarray(bundle.y_obs, dtype=float).reshape(-1, 1)).to_csv(
        data_path, header=False, index=False, float_format="%.17g")
    written["data"] = data_path

    info_path = os.path.join(directory, f"{name}.info.json")
    info = {key: np.asarray(value).tolist() if isinstance(value, np.ndarray) else value
            for key, value in bundle.info.items()}
    if model is not None:
        info["domain_geometry"] = model.domain_geometry.to_dict()
        info["range_geometry"] = model.range_geometry.to_dict()
    with open(info_path, "w") as file:
        json.dump(info, file, indent=2)
    written["info"] = info_path
    logger.info("Exported test problem '%s' to %s", name, directory)
    return written
