import json
import logging
import os
import re
from dataclasses import dataclass, field

from samples.exporter import STATISTICS
from samplers.sampler_config import SamplerConfig
from utilities.errors import ConfigError

logger = logging.getLogger(__name__)

SPEC_VERSION = 1
TOP_LEVEL_KEYS = ("spec_version", "run_id", "problem", "variables", "sampler", "N", "Nb", "thin", "chains",
                  "seed", "outputs")
OUTPUT_KEYS = ("directory", "statistics", "ci_level")
DEFAULT_STATISTICS = ("mean", "std", "ci")
VARIABLE_FAMILIES = ("Gaussian", "Gamma", "Lognormal", "Uniform", "GMRF", "LMRF", "CMRF")


@dataclass
class RunConfig:
    """
    A validated batch run.

    problem is {"builtin": name, "options": {...}} or {"model_csv": path, "data_csv": path}, with
    paths already resolved against the config file directory. sampler is "auto", a dict of
    SamplerConfig for a single sampler ({"*": config}) or one config per variable (Gibbs).
    """
    problem: dict
    variables: list = field(default_factory=list)
    sampler: object = "auto"
    N: int = 1000
    Nb: int = None
    thin: int = 1
    chains: int = 1
    seed: int = 0
    statistics: tuple = DEFAULT_STATISTICS
    output_dir: str = None
    ci_level: float = 95.0
    run_id: str = "run"

    @property
    def burn_in(self):
        return int(0.2 * self.N) if self.Nb is None else self.Nb


class ConfigLoader:
    """
    Reads a JSON run config and validates it into a RunConfig.

    Every ConfigError carries the 1-based line of the offending key when it can be located.
    """

    def __init__(self, path):
        self.path = path
        self.base_dir = os.path.dirname(os.path.abspath(path))
        self.text = None

    def load(self):
        try:
            with open(self.path) as file:
                self.text = file.read()
        except OSError as error:
            raise ConfigError(f"Cannot read config {self.path}: {error.strerror}") from error
        try:
            document = json.loads(self.text)
        except json.JSONDecodeError as error:
            raise ConfigError(f"Invalid JSON: {error.msg}", error.lineno) from error
        if not isinstance(document, dict):
            raise ConfigError("The config must be a JSON object", 1)
        return self.validate(document)

    # ---------------------------------------------------------------- validation

    def validate(self, document):
        unknown = [key for key in document if key not in TOP_LEVEL_KEYS]
        if unknown:
            self._fail(f"Unknown key '{unknown[0]}', expected some of {list(TOP_LEVEL_KEYS)}", unknown[0])
        if document.get("spec_version") != SPEC_VERSION:
            self._fail(f"spec_version must be {SPEC_VERSION}, got {document.get('spec_version')!r}", "spec_version")
        if "problem" not in document:
            self._fail("Missing required key 'problem'")

        config = RunConfig(problem=self._problem(document["problem"]))
        config.run_id = str(document.get("run_id", os.path.splitext(os.path.basename(self.path))[0]))
        config.variables = self._variables(document.get("variables", []))
        config.sampler = self._sampler(document.get("sampler", "auto"))
        config.N = self._integer(document, "N", 1000, minimum=1)
        config.Nb = self._integer(document, "Nb", None, minimum=0)
        config.thin = self._integer(document, "thin", 1, minimum=1)
        config.chains = self._integer(document, "chains", 1, minimum=1)
        config.seed = self._integer(document, "seed", 0, minimum=0)
        self._outputs(document.get("outputs", {}), config)
        logger.debug("Loaded config %s", self.path)
        return config

    def _problem(self, problem):
        if not isinstance(problem, dict):
            self._fail("'problem' must be an object", "problem")
        if "builtin" in problem:
            # Deferred import: the registry pulls in every model and distribution
            from testproblems import TEST_PROBLEMS
            name = problem["builtin"]
            if name not in TEST_PROBLEMS:
                self._fail(f"Unknown builtin problem '{name}', options are {sorted(TEST_PROBLEMS)}",
                           "problem", "builtin")
            options = problem.get("options", {})
            if not isinstance(options, dict):
                self._fail("'problem.options' must be an object", "problem", "options")
            return {"builtin": name, "options": dict(options)}
        missing = [key for key in ("model_csv", "data_csv") if key not in problem]
        if missing:
            self._fail(f"'problem' needs 'builtin' or both 'model_csv' and 'data_csv', missing {missing}", "problem")
        return {key: os.path.join(self.base_dir, problem[key]) for key in ("model_csv", "data_csv")}

    def _variables(self, variables):
        if not isinstance(variables, list):
            self._fail("'variables' must be a list", "variables")
        parsed, names = [], set()
        for entry in variables:
            if not isinstance(entry, dict) or "name" not in entry or "family" not in entry:
                self._fail("Every variable needs 'name' and 'family'", "variables")
            if entry["family"] not in VARIABLE_FAMILIES:
                self._fail(f"Unknown family '{entry['family']}' for '{entry['name']}', options are "
                           f"{list(VARIABLE_FAMILIES)}", "variables", "family")
            if entry["name"] in names:
                self._fail(f"Duplicate variable '{entry['name']}'", "variables", "name")
            names.add(entry["name"])
            parsed.append(dict(entry))
        return parsed

    def _sampler(self, sampler):
        if sampler == "auto":
            return "auto"
        if not isinstance(sampler, dict) or not sampler:
            self._fail("'sampler' must be \"auto\" or an object", "sampler")
        if "kind" in sampler:
            return {"*": self._sampler_config(sampler, ("sampler",))}
        configs = {}
        for variable, options in sampler.items():
            if isinstance(options, str):
                options = {"kind": options}
            if not isinstance(options, dict) or "kind" not in options:
                self._fail(f"Sampler for '{variable}' needs a 'kind'", "sampler", variable)
            configs[variable] = self._sampler_config(options, ("sampler", variable))
        return configs

    def _sampler_config(self, options, path):
        try:
            return SamplerConfig.from_dict(options)
        except (TypeError, ValueError) as error:
            self._fail(str(error), *path)

    def _integer(self, document, key, default, minimum):
        value = document.get(key, default)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            self._fail(f"'{key}' must be an integer, got {value!r}", key)
        if value < minimum:
            self._fail(f"'{key}' must be at least {minimum}, got {value}", key)
        return value

    def _outputs(self, outputs, config):
        if not isinstance(outputs, dict):
            self._fail("'outputs' must be an object", "outputs")
        unknown = [key for key in outputs if key not in OUTPUT_KEYS]
        if unknown:
            self._fail(f"Unknown output option '{unknown[0]}', expected some of {list(OUTPUT_KEYS)}",
                       "outputs", unknown[0])
        statistics = outputs.get("statistics", list(DEFAULT_STATISTICS))
        bad = [what for what in statistics if what not in STATISTICS]
        if bad:
            self._fail(f"Unknown statistics {bad}, options are {list(STATISTICS)}", "outputs", "statistics")
        config.statistics = tuple(statistics)
        level = outputs.get("ci_level", 95.0)
        if isinstance(level, bool) or not isinstance(level, (int, float)) or not 0 < level < 100:
            self._fail(f"'ci_level' must be a number in (0, 100), got {level!r}", "outputs", "ci_level")
        config.ci_level = float(level)
        if "directory" in outputs:
            config.output_dir = os.path.join(self.base_dir, outputs["directory"])

    # ---------------------------------------------------------------- line lookup

    def _fail(self, message, *path):
        raise ConfigError(message, self.line_of(*path) if path else None)

    def line_of(self, *path):
        """1-based line of the last key in path, searching each key after the previous one."""
        if self.text is None:
            return None
        position, found = 0, None
        for key in path:
            match = re.compile(r'"' + re.escape(str(key)) + r'"\s*:').search(self.text, position)
            if match is None:
                break
            position, found = match.end(), match.start()
        if found is None:
            return None
        return self.text.count("\n", 0, found) + 1


def load_config(path):
    return ConfigLoader(path).load()
