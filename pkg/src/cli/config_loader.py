"""
ConfigLoader - loading and validation of run configuration files.

Supports YAML and JSON. Validates the schema with pydantic, then the
references between sections (data columns, covariate vectors, kappa).
All problems are collected and raised together.
"""

import json
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd
import yaml
from pydantic import ValidationError

from exceptions import ConfigValidationError
from mixture import LinDepConfig
from .models import RunConfig

# covariate columns produced by the built-in generators
SIMULATED_COVARIATES: dict[str, tuple[str, ...]] = {
    "five_gaussian": (),
    "two_regime": ("x",),
    "ais_like": ("rcc", "Ht", "Wt"),
}


class ConfigLoader:
    """
    Run configuration loader.

    Usage:
        loader = ConfigLoader()
        config = loader.load("config/simulated_a5.yaml")

        # With command-line overrides
        config = loader.load("config/lindep.yaml", overrides={"seed": 7})

        # Validation only
        errors = loader.validate_file("config/stamps.yaml")
    """

    def __init__(self):
        self.errors: list[dict] = []

    def load(self, path: Union[str, Path], overrides: Optional[dict[str, Any]] = None) -> RunConfig:
        """
        Load a configuration file.

        Args:
            path: YAML or JSON file
            overrides: Top-level keys that replace the file's values

        Returns:
            RunConfig

        Raises:
            ConfigValidationError: The configuration is invalid
            FileNotFoundError: The file does not exist
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")

        content = path.read_text(encoding="utf-8")
        if path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(content) or {}
        elif path.suffix == ".json":
            data = json.loads(content)
        else:
            raise ConfigValidationError([{
                "field": "file",
                "reason": f"Unsupported file format: {path.suffix}. Use .yaml, .yml or .json",
            }])
        if not isinstance(data, dict):
            raise ConfigValidationError([{"field": "file", "reason": "top level must be a mapping"}])

        # relative data paths are resolved against the config file
        data_section = data.get("data")
        if isinstance(data_section, dict) and data_section.get("path"):
            data_path = Path(data_section["path"])
            if not data_path.is_absolute() and not data_path.exists():
                data_section["path"] = str(path.parent / data_path)

        return self.load_dict({**data, **(overrides or {})})

    def load_dict(self, data: dict) -> RunConfig:
        """
        Load a configuration from a dictionary.

        Raises:
            ConfigValidationError: The configuration is invalid
        """
        self.errors = []
        try:
            config = RunConfig(**data)
        except ValidationError as e:
            self.errors = self._parse_pydantic_errors(e)
            raise ConfigValidationError(self.errors)

        self._validate_references(config)
        if self.errors:
            raise ConfigValidationError(self.errors)
        return config

    def validate_file(self, path: Union[str, Path]) -> list[dict]:
        """
        Validate a file without keeping the result.

        Returns:
            List of errors (empty when the file is valid)
        """
        try:
            self.load(path)
            return []
        except ConfigValidationError as e:
            return e.errors
        except FileNotFoundError:
            return [{"field": "file", "reason": f"File not found: {path}"}]
        except Exception as e:
            return [{"field": "file", "reason": str(e)}]

    def _parse_pydantic_errors(self, error: ValidationError) -> list[dict]:
        """Convert pydantic errors to the loader's format."""
        errors = []
        for err in error.errors():
            field = ".".join(str(loc) for loc in err["loc"]) or "config"
            errors.append({
                "field": field,
                "reason": err["msg"],
                "type": err["type"],
            })
        return errors

    def _data_columns(self, config: RunConfig) -> Optional[list[str]]:
        spec = config.data
        if spec.simulate is not None:
            response = {"five_gaussian": "y", "two_regime": "y", "ais_like": "lbm"}[spec.simulate]
            return [response, *SIMULATED_COVARIATES[spec.simulate]]
        path = Path(spec.path)
        if not path.exists():
            self.errors.append({"field": "data.path", "reason": f"File not found: {spec.path}"})
            return None
        try:
            return list(pd.read_csv(path, nrows=0).columns)
        except Exception as e:
            self.errors.append({"field": "data.path", "reason": f"Cannot read header: {e}"})
            return None

    def _validate_references(self, config: RunConfig) -> None:
        """Check that the sections agree with each other and with the data."""
        columns = self._data_columns(config)
        spec = config.data

        if columns is not None:
            if spec.response not in columns:
                self.errors.append({
                    "field": "data.response",
                    "reason": f"Unknown column: '{spec.response}'",
                })
            for i, name in enumerate(spec.covariates):
                if name not in columns:
                    self.errors.append({
                        "field": f"data.covariates.{i}",
                        "reason": f"Unknown column: '{name}'",
                    })

        if isinstance(config.model, LinDepConfig):
            expected = config.model.n_covariates
            if len(spec.covariates) != expected:
                self.errors.append({
                    "field": "data.covariates",
                    "reason": f"linear dependent model with {len(config.model.b0)} coefficients "
                              f"needs {expected} covariates, got {len(spec.covariates)}",
                })
            for i, vector in enumerate(config.grid.covariate_vectors):
                if len(vector) != expected:
                    self.errors.append({
                        "field": f"grid.covariate_vectors.{i}",
                        "reason": f"expected {expected} values, got {len(vector)}",
                    })
        else:
            if spec.covariates:
                self.errors.append({
                    "field": "data.covariates",
                    "reason": "gauss_nig model takes no covariates",
                })
            if config.grid.covariate_vectors:
                self.errors.append({
                    "field": "grid.covariate_vectors",
                    "reason": "gauss_nig model takes no covariate vectors",
                })

        if config.kappa is None and config.calibration is None:
            self.errors.append({
                "field": "kappa",
                "reason": "No kappa. Set kappa, a preset, or a calibration target.",
            })
        if config.kappa is not None and config.calibration is not None:
            self.errors.append({
                "field": "calibration",
                "reason": "Set either kappa or calibration, not both.",
            })

        prior = config.epsilon_prior
        if prior is not None and prior.kind != "point" and not prior.contains(config.epsilon):
            self.errors.append({
                "field": "epsilon",
                "reason": f"initial epsilon {config.epsilon} lies outside the prior support "
                          f"[{prior.lower}, {prior.upper}]",
            })


def load_config(path: Union[str, Path], overrides: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Shortcut for ConfigLoader().load.

    Usage:
        config = load_config("config/simulated_a5.yaml")
    """
    return ConfigLoader().load(path, overrides)
