"""Command line experiment runner."""

from .config import ConfigError, ExperimentConfig, read_config_file
from .main import build_parser, emit_plot_data, main, run

__all__ = ["ConfigError", "ExperimentConfig", "read_config_file", "build_parser", "emit_plot_data",
           "main", "run"]
