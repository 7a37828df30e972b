# Batch front end for Bayesian uncertainty quantification runs.
#
#   run <config.json>        sample the problem declared in a config and write summary + exports
#   summarize <dir>          table of mean, std, credibility bounds, ESS and R-hat of exported chains
#   diag <dir> <variable>    trace, autocorrelation and IACT / ESS files for one variable
#
# Exit codes: 0 success, 1 runtime failure, 2 config or input error, 3 capability error.

import argparse
import glob
import json
import logging
import os
import sys

import pandas as pd

from processors.uq_processor import UQProcessor
from samples.exporter import export, load_samples
from samples.run_summary import chain_diagnostics, format_summary, summarize_chains
from utilities.config_loader import ConfigLoader
from utilities.errors import CapabilityError, ConditioningError, ConfigError

#########################################################
# Configuration
#########################################################
DEFAULT_OUTPUT_ROOT = "./../output/"
OUTPUT_ROOT_ENV = "UQ_OUTPUT_ROOT"
DEFAULT_CI_LEVEL = 95.0
SUMMARY_FILE_NAME = "summary.json"

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_CAPABILITY = 3
#########################################################
# End configuration
#########################################################


def output_directory(config, out=None):
    """--out wins, then the config's outputs.directory, then <$UQ_OUTPUT_ROOT or default>/<run_id>."""
    if out:
        return out
    if config.output_dir:
        return config.output_dir
    return os.path.join(os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT), config.run_id)


def run(args):
    print("Run UQ")
    print("------")
    print("Using config file:", args.config)
    config = ConfigLoader(args.config).load()
    if args.seed is not None:
        config.seed = args.seed
    if args.chains is not None:
        if args.chains < 1:
            raise ConfigError(f"--chains must be at least 1, got {args.chains}")
        config.chains = args.chains
    processor = UQProcessor(config, output_directory(config, args.out))
    try:
        summary = processor.run()
    finally:
        processor.close()
    logging.info("Finished run '%s' in %s", summary["run_id"], processor.output_dir)
    return EXIT_OK


def raw_exports(directory):
    """
    Raw chain files of an output directory grouped by variable.

    :return: {dict} variable -> sorted list of (run id, csv path)
    """
    if not os.path.isdir(directory):
        raise ConfigError(f"Directory '{directory}' does not exist")
    grouped = {}
    for path in sorted(glob.glob(os.path.join(directory, "*.raw.csv"))):
        parts = os.path.basename(path)[:-len(".raw.csv")].rsplit(".", 1)
        if len(parts) != 2:
            continue
        run_id, variable = parts
        grouped.setdefault(variable, []).append((run_id, path))
    if not grouped:
        raise ConfigError(f"No raw chain exports (*.raw.csv) in '{directory}'")
    return grouped


def summarize(args):
    print("Summarize chains")
    print("----------------")
    print("Using directory:", args.directory)
    summaries = {}
    for variable, files in raw_exports(args.directory).items():
        chains = [load_samples(path) for _, path in files]
        summaries[variable] = summarize_chains(chains, args.level)
    print(format_summary(summaries))
    path = os.path.join(args.directory, SUMMARY_FILE_NAME)
    with open(path, "w") as file:
        json.dump({"ci_level": args.level, "variables": summaries}, file, indent=2)
    logging.info("Wrote %s", path)
    return EXIT_OK


def diag(args):
    print("Chain diagnostics")
    print("-----------------")
    print("Using directory:", args.directory)
    print("Variable:", args.variable)
    exports = raw_exports(args.directory)
    if args.variable not in exports:
        raise ConfigError(f"Unknown variable '{args.variable}', available: {sorted(exports)}")
    for run_id, path in exports[args.variable]:
        samples = load_samples(path)
        export(samples, "trace", args.directory, run_id, args.variable)
        acf, info = chain_diagnostics(samples)
        stem = os.path.join(args.directory, f"{run_id}.{args.variable}")
        pd.DataFrame(acf).to_csv(f"{stem}.acf.csv", header=False, index=False, float_format="%.17g")
        with open(f"{stem}.diag.json", "w") as file:
            json.dump(dict(info, run_id=run_id, variable=args.variable), file, indent=2)
        logging.info("Wrote diagnostics for %s", stem)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(description="Bayesian uncertainty quantification batch runs")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Sample the problem declared in a JSON config")
    run_parser.add_argument("config", type=str, help='Path of the run config. Example: "data/gravity.json"')
    run_parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    run_parser.add_argument("--out", type=str, default=None, help="Output directory for this run")
    run_parser.add_argument("--chains", type=int, default=None, help="Override the number of chains")
    run_parser.set_defaults(handler=run)

    summarize_parser = subparsers.add_parser("summarize", help="Summary table of exported chains")
    summarize_parser.add_argument("directory", type=str, help="Output directory of a run")
    summarize_parser.add_argument("--level", type=float, default=DEFAULT_CI_LEVEL,
                                  help="Credibility level in percent")
    summarize_parser.set_defaults(handler=summarize)

    diag_parser = subparsers.add_parser("diag", help="Trace and autocorrelation files for one variable")
    diag_parser.add_argument("directory", type=str, help="Output directory of a run")
    diag_parser.add_argument("variable", type=str, help="Variable name, e.g. x")
    diag_parser.set_defaults(handler=diag)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    # Set up logging
    logging.basicConfig(format="%(asctime)s: %(message)s", level=logging.INFO, datefmt="%H:%M:%S")

    try:
        return args.handler(args)
    except (ConfigError, ConditioningError) as error:
        logging.error("Invalid input: %s", error)
        return EXIT_CONFIG
    except CapabilityError as error:
        logging.error("Unsupported operation: %s", error)
        return EXIT_CAPABILITY
    except Exception as error:
        logging.exception("Run failed: %s", error)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
