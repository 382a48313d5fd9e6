"""
RunWriter - the single writer of a run directory.

Layout:
    config.yaml         resolved configuration (defaults expanded, seed included)
    calibration.json    kappa calibration, when the run calibrated
    chain_<i>/          archive files, fit report files, predictive grids
"""

import json
import logging
import threading
from pathlib import Path
from typing import Any, Union

import pandas as pd
import yaml

from config import settings
from diagnostics import FitReport, write_fit_report
from gibbs import ChainArchive
from mixture import PredictiveGrid

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class RunWriter:
    """
    Funnels every file of one run through one object.

    Usage:
        writer = RunWriter.for_run("sim_a5")
        writer.write_config(config)
        writer.write_archive(0, archive)
    """

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @classmethod
    def for_run(cls, name: str, output_dir: Union[str, Path, None] = None) -> "RunWriter":
        return cls(Path(output_dir) if output_dir else Path(settings.output_root) / name)

    def chain_dir(self, chain_id: int) -> Path:
        return self.directory / f"chain_{chain_id}"

    def path(self, name: str) -> Path:
        return self.directory / name

    def write_yaml(self, name: str, payload: dict) -> Path:
        with self._lock:
            target = self.path(name)
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8") as f:
                yaml.safe_dump(payload, f, sort_keys=False)
        return target

    def write_json(self, name: str, payload: Any) -> Path:
        with self._lock:
            target = self.path(name)
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8") as f:
                json.dump(payload, f, indent=2)
        return target

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        with self._lock:
            target = self.path(name)
            target.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(target, index=False, float_format=FLOAT_FORMAT)
        return target

    def write_config(self, config) -> Path:
        return self.write_yaml("config.yaml", config.model_dump(mode="json"))

    def write_archive(self, chain_id: int, archive: ChainArchive) -> Path:
        with self._lock:
            return archive.write(self.chain_dir(chain_id))

    def write_report(self, chain_id: int, report: FitReport, pi, subdir: str = "") -> Path:
        with self._lock:
            target = self.chain_dir(chain_id) / subdir if subdir else self.chain_dir(chain_id)
            return write_fit_report(report, pi, target)

    def write_grid(self, chain_id: int, index: int, grid: PredictiveGrid) -> Path:
        name = "grid.csv" if grid.x is None else f"grid_x{index}.csv"
        frame = grid.to_frame()
        if grid.x is not None:
            for j, value in enumerate(grid.x):
                frame.insert(j, f"x{j + 1}", value)
        return self.write_frame(f"chain_{chain_id}/{name}", frame)
