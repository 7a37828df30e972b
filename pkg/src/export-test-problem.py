# Writes a built-in test problem (model matrix, observed data, truth and noise description) to
# disk so it can be used as a user model in a run-uq.py config.

import argparse
import json
import logging
import sys

from testproblems import TEST_PROBLEMS, build_test_problem, export_bundle

#########################################################
# Configuration
#########################################################
DEFAULT_OUTPUT_DIR = "./../data/test-problems/"
#########################################################
# End configuration
#########################################################


def main(argv=None):
    parser = argparse.ArgumentParser(description="Export a built-in test problem as CSV and JSON files")
    parser.add_argument("problem", type=str, choices=sorted(TEST_PROBLEMS), help="Test problem name")
    parser.add_argument("--out", type=str, default=DEFAULT_OUTPUT_DIR, help="Output directory")
    parser.add_argument("--name", type=str, default=None, help="File name stem, defaults to the problem name")
    parser.add_argument("--options", type=str, default="{}",
                        help='Constructor options as JSON. Example: \'{"n": 64, "phantom": "square"}\'')
    args = parser.parse_args(argv)

    print("Export test problem")
    print("-------------------")
    print("Problem:", args.problem)

    logging.basicConfig(format="%(asctime)s: %(message)s", level=logging.INFO, datefmt="%H:%M:%S")

    try:
        options = json.loads(args.options)
        bundle = build_test_problem(args.problem, **options)
    except (ValueError, TypeError) as error:
        logging.error("Invalid options: %s", error)
        return 2
    written = export_bundle(bundle, args.out, args.name or args.problem)
    for kind, path in written.items():
        logging.info("%s: %s", kind, path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
