"""Seeded experiments, reports and the command-line interface."""
from .config import (SCHEMA_VERSION, SEED_ENV, ConfigError, ExperimentConfig, ResourceError,
                     powers_of_ten, resolve_seed, trial_seed)
from .experiments import (coverage_experiment, distribution_experiment, flag_choice_experiment,
                          increment_experiment, program_first_returns, resolve_target,
                          return_experiment, simulate, walk_first_returns)
from .report import ExperimentReport
from .stats import ChiSquareResult, chi_square, pool_bins, two_sample_within_sigma, within_sigma

__all__ = [
    "SCHEMA_VERSION", "SEED_ENV", "ConfigError", "ExperimentConfig", "ResourceError",
    "powers_of_ten", "resolve_seed", "trial_seed", "coverage_experiment",
    "distribution_experiment", "flag_choice_experiment", "increment_experiment",
    "program_first_returns", "resolve_target", "return_experiment", "simulate",
    "walk_first_returns", "ExperimentReport", "ChiSquareResult", "chi_square", "pool_bins",
    "two_sample_within_sigma", "within_sigma",
]
