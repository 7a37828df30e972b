from testproblems.deconvolution import deconvolution_1d, deconvolution_2d, total_variation_2d
from testproblems.eight_schools import eight_schools
from testproblems.gravity_problem import gravity_problem
from testproblems.phantoms import phantom_1d, phantom_2d, shapes_phantom, sinc_phantom, square_phantom
from testproblems.test_problem_bundle import export_bundle

TEST_PROBLEMS = {
    "deconvolution_1d": deconvolution_1d,
    "deconvolution_2d": deconvolution_2d,
    "gravity": gravity_problem,
    "eight_schools": eight_schools,
}


def build_test_problem(name, **options):
    """Construct a registered test problem by name."""
    if name not in TEST_PROBLEMS:
        raise ValueError(f"Unknown test problem '{name}', options are {sorted(TEST_PROBLEMS)}")
    return TEST_PROBLEMS[name](**options)
