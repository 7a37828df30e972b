from samples.diagnostics import autocorrelation, ess, iact, rhat, rhat_per_coordinate
from samples.exporter import STATISTICS, export, export_all, load_samples
from samples.samples import DEFAULT_CI_LEVEL, Samples, stack_chains
