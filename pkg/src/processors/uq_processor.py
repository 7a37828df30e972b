# Batch pipeline behind run-uq.py: config -> Bayesian problem -> sampling plan -> chains -> files.

import concurrent.futures
import inspect
import json
import logging
import os
import re

import numpy as np

from distributions import FAMILIES
from inference.bayesian_problem import BayesianProblem
from inference.sampler_selection import SamplingPlan
from models.forward_model import LinearModel
from samples.exporter import export
from samples.run_summary import summarize_chains
from samplers.registry import sampler_for_plan
from testproblems import TEST_PROBLEMS, build_test_problem
from utilities.config_loader import SPEC_VERSION
from utilities.deferred import Deferred
from utilities.errors import ConfigError
from utilities.linalg import load_matrix_csv
from utilities.logger_setup import LoggerSetup
from utilities.rng import chain_generators

logger = logging.getLogger(__name__)

# Upper bound on concurrently running chains
MAX_WORKERS = 8
# Smoothness prior used for the deblurring problems when a config declares no variables
DEFAULT_PRIOR_PRECISION = 50.0
DATA_VARIABLE = "y"
PARAMETER_VARIABLE = "x"

MODEL_EXPRESSION = re.compile(r"model\((\w+)\)")
RECIPROCAL_EXPRESSION = re.compile(r"1\s*/\s*(\w+)")
NAME_EXPRESSION = re.compile(r"[A-Za-z_]\w*")


class UQProcessor:
    """Runs one validated RunConfig and writes its summary and exports."""

    def __init__(self, config, output_dir, log_dir=None):
        """
        :param {RunConfig} config: Validated run configuration
        :param {str} output_dir: Directory receiving every file of the run
        :param {str} log_dir: Directory of the run log file; defaults to <output_dir>/logs
        """
        self.config = config
        self.output_dir = output_dir
        self.logger_setup = LoggerSetup(log_dir or os.path.join(output_dir, "logs"), "uq_processor")
        self.logger = self.logger_setup.get_logger()

    # ---------------------------------------------------------------- problem

    def build_problem(self):
        """
        The BayesianProblem of the config, data already set.

        :return: {BayesianProblem}
        """
        problem = self.config.problem
        if "builtin" in problem:
            bundle = self._build_bundle(problem["builtin"], problem["options"])
            model = bundle.model
            declared = self._distributions(self.config.variables, model)
            overridden = {dist.name for dist in declared}
            distributions = declared + [dist for dist in bundle.distributions if dist.name not in overridden]
            if PARAMETER_VARIABLE not in {dist.name for dist in distributions} and model is not None:
                distributions.append(FAMILIES["GMRF"](0.0, DEFAULT_PRIOR_PRECISION, name=PARAMETER_VARIABLE,
                                                      geometry=model.domain_geometry))
            if DATA_VARIABLE not in {dist.name for dist in distributions}:
                raise ConfigError(f"Problem '{problem['builtin']}' needs a '{DATA_VARIABLE}' variable "
                                  f"for its data")
            bayesian_problem = BayesianProblem(*distributions, deterministic=bundle.deterministic)
            return bayesian_problem.set_data(**bundle.data)

        model = LinearModel.from_csv(problem["model_csv"])
        y_obs = load_matrix_csv(problem["data_csv"]).reshape(-1)
        distributions = self._distributions(self.config.variables, model)
        if DATA_VARIABLE not in {dist.name for dist in distributions}:
            raise ConfigError(f"A user model needs a variable named '{DATA_VARIABLE}' for the data")
        return BayesianProblem(*distributions).set_data(**{DATA_VARIABLE: y_obs})

    def _build_bundle(self, name, options):
        options = dict(options)
        if "seed" in inspect.signature(TEST_PROBLEMS[name]).parameters:
            options.setdefault("seed", self.config.seed)
        try:
            return build_test_problem(name, **options)
        except TypeError as error:
            raise ConfigError(f"Invalid options for '{name}': {error}") from error

    def _distributions(self, entries, model):
        model_inputs = {match for entry in entries for value in entry.values() if isinstance(value, str)
                        for match in MODEL_EXPRESSION.findall(value)}
        distributions = []
        for entry in entries:
            family = FAMILIES[entry["family"]]
            params = {key: value for key, value in entry.items() if key not in ("name", "family")}
            accepted = [key for key in inspect.signature(family).parameters if key not in ("name", "geometry")]
            unknown = sorted(set(params) - set(accepted))
            if unknown:
                raise ConfigError(f"{entry['family']} '{entry['name']}' has no parameters {unknown}, "
                                  f"expected some of {accepted}")
            params = {key: self._parameter(value, model) for key, value in params.items()}
            geometry = model.domain_geometry if entry["name"] in model_inputs and model is not None else None
            try:
                distributions.append(family(name=entry["name"], geometry=geometry, **params))
            except (TypeError, ValueError) as error:
                raise ConfigError(f"Invalid {entry['family']} '{entry['name']}': {error}") from error
        return distributions

    @staticmethod
    def _parameter(value, model):
        """Numbers and lists are constants; "model(x)", "1/s" and "s" refer to other variables."""
        if isinstance(value, str):
            text = value.strip()
            match = MODEL_EXPRESSION.fullmatch(text)
            if match:
                if model is None:
                    raise ConfigError(f"'{value}' needs a forward model, this problem has none")
                return model.of(match.group(1))
            match = RECIPROCAL_EXPRESSION.fullmatch(text)
            if match:
                return Deferred.reciprocal(match.group(1))
            if NAME_EXPRESSION.fullmatch(text):
                return Deferred.identity(text)
            raise ConfigError(f"Cannot parse parameter expression '{value}'")
        if isinstance(value, list):
            return np.asarray(value, dtype=float)
        return float(value)

    # ---------------------------------------------------------------- sampling

    def sampling_plan(self, problem):
        """
        :return: {tuple} (SamplingPlan, sampler configs or None)
        """
        sampler = self.config.sampler
        targets = problem.posterior.targets
        if sampler == "auto":
            return problem.sampling_plan(), None
        if "*" in sampler:
            config = sampler["*"]
            if config.kind == "Gibbs":
                raise ConfigError("A Gibbs sampler needs one sampler per variable")
            plan = SamplingPlan.single(config.kind, targets)
        else:
            if set(sampler) != set(targets):
                raise ConfigError(f"The sampler plan names {sorted(sampler)}, the posterior targets are {targets}")
            plan = SamplingPlan.gibbs({name: sampler[name].kind for name in targets})
        self.logger.info(plan.describe())
        return plan, dict(sampler)

    def run_chains(self, problem, plan, configs):
        """
        Run config.chains chains concurrently, chain i seeded by child i of SeedSequence(seed).

        :return: {list} ChainResult per chain, in chain order
        """
        config = self.config
        generators = chain_generators(config.seed, config.chains)

        def run_chain(index):
            logger.info("Chain %s starting", index)
            sampler = sampler_for_plan(problem.posterior, plan, configs)
            result = sampler.sample(config.N, config.burn_in, generators[index])
            result.seed = f"{config.seed}/{index}"
            if config.thin > 1:
                result.samples = {name: samples.thin(config.thin) for name, samples in result.samples.items()}
            logger.info("Chain %s finished in %.2fs", index, result.wall_time)
            return index, result

        results = [None] * config.chains
        with concurrent.futures.ThreadPoolExecutor(max_workers=min(config.chains, MAX_WORKERS)) as executor:
            futures = [executor.submit(run_chain, index) for index in range(config.chains)]
            for future in concurrent.futures.as_completed(futures):
                index, result = future.result()
                results[index] = result
        return results

    # ---------------------------------------------------------------- outputs

    def write_outputs(self, results, plan):
        """
        Raw chains and the requested statistics per chain and variable, then the summary JSON.

        :return: {tuple} (summary dict, summary path)
        """
        config = self.config
        os.makedirs(self.output_dir, exist_ok=True)
        statistics = ["raw"] + [what for what in config.statistics if what != "raw"]
        for index, result in enumerate(results):
            for name, samples in result.samples.items():
                for what in statistics:
                    export(samples, what, self.output_dir, chain_run_id(config.run_id, index), name,
                           config.ci_level)

        variables = {name: summarize_chains([result[name] for result in results], config.ci_level)
                     for name in results[0].variables}
        summary = {
            "spec_version": SPEC_VERSION,
            "run_id": config.run_id,
            "problem": config.problem,
            "plan": plan.to_dict(),
            "N": config.N,
            "Nb": config.burn_in,
            "thin": config.thin,
            "chains": config.chains,
            "seed": config.seed,
            "ci_level": config.ci_level,
            "variables": variables,
            "chain_results": [result.summary() for result in results],
            "timing": {"wall_time": [result.wall_time for result in results]},
        }
        path = os.path.join(self.output_dir, f"{config.run_id}.summary.json")
        with open(path, "w") as file:
            json.dump(summary, file, indent=2)
        self.logger.info("Wrote summary %s", path)
        return summary, path

    def run(self):
        self.logger.info("Run '%s': %s chains of %s draws after %s burn-in", self.config.run_id,
                         self.config.chains, self.config.N, self.config.burn_in)
        problem = self.build_problem()
        self.logger.info(str(problem))
        plan, configs = self.sampling_plan(problem)
        results = self.run_chains(problem, plan, configs)
        summary, _ = self.write_outputs(results, plan)
        return summary

    def close(self):
        self.logger_setup.close()


def chain_run_id(run_id, index):
    return f"{run_id}_c{index}"
