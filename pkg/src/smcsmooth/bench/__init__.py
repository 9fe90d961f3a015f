"""Experiment harness: configuration, replicated runs, summaries and CLI."""

from .config import ALGORITHMS, ExperimentConfig, build_problem, load_config
from .kernels import benchmark_backends
from .runner import RunRecord, read_results, run_experiment, run_replicate, write_results
from .summary import bootstrap_se_median, hybrid_growth_report, slope_fit, summarize, tail_report

__all__ = [
    "ALGORITHMS",
    "ExperimentConfig",
    "RunRecord",
    "benchmark_backends",
    "bootstrap_se_median",
    "build_problem",
    "hybrid_growth_report",
    "load_config",
    "read_results",
    "run_experiment",
    "run_replicate",
    "slope_fit",
    "summarize",
    "tail_report",
    "write_results",
]
