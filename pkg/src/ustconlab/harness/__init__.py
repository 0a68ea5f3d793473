"""Experiment campaigns, configuration and the command-line interface."""
from .campaigns import CAMPAIGNS, render, run_experiment
from .config import COMMANDS, ConfigError, ExperimentConfig
from .report import Report, trial_rng, trial_seed, wilson_interval

__all__ = ["CAMPAIGNS", "COMMANDS", "ConfigError", "ExperimentConfig", "Report", "render",
           "run_experiment", "trial_rng", "trial_seed", "wilson_interval"]
