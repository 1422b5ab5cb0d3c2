"""Instance generators, verification suites and the command line."""
from .catalog import CATALOG, gen_bounded_rep, unitary_generators
from .config import SUITES, ExperimentConfig
from .suite import SuiteReport, run_suite
