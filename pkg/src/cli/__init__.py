"""
cli - configuration, data ingestion and orchestration of the engine.

Components:
- RunConfig / ConfigLoader: validated run files with reference checks
- ingest_csv: CSV to Dataset with row-level error locations
- simulate_*: reference five-Gaussian data and synthetic fixtures
- RunWriter: single writer of a run directory
- main: argparse subcommands run, prior-simulate, eppf-check, calibrate, diagnose
"""

from .models import AIS_REFERENCE_VECTORS, DataSpec, GridSpec, RunConfig, ScheduleSpec
from .config_loader import ConfigLoader, load_config
from .ingest import ingest_csv
from .simulate import (
    REFERENCE_COMPONENTS,
    REFERENCE_WEIGHTS,
    reference_density,
    reference_mean,
    reference_weights,
    simulate_ais_like,
    simulate_dataset,
    simulate_reference_data,
    simulate_two_regime,
)
from .writer import RunWriter
from .commands import build_parser, load_dataset, main, moment_set_masses

__all__ = [
    # Models
    "AIS_REFERENCE_VECTORS",
    "DataSpec",
    "GridSpec",
    "RunConfig",
    "ScheduleSpec",
    # Config
    "ConfigLoader",
    "load_config",
    # Data
    "ingest_csv",
    "REFERENCE_COMPONENTS",
    "REFERENCE_WEIGHTS",
    "reference_density",
    "reference_mean",
    "reference_weights",
    "simulate_ais_like",
    "simulate_dataset",
    "simulate_reference_data",
    "simulate_two_regime",
    # Orchestration
    "RunWriter",
    "build_parser",
    "load_dataset",
    "main",
    "moment_set_masses",
]
