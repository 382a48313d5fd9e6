"""
Full fit report of a chain and its file outputs.
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from mixture import Dataset, MixtureModel
from .clustering import binder_partition, coclustering_matrix, kn_posterior
from .indexes import predictive_indexes
from .models import FitReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def fit_report(archive, data: Dataset, model: MixtureModel, loss_ratio: float = 1.0) -> tuple[FitReport, np.ndarray]:
    """
    Predictive indexes, K_n posterior and Binder partition.

    Returns the report and the co-clustering matrix it was computed from.
    """
    report = predictive_indexes(archive, data, model)
    pi = coclustering_matrix(archive)
    partition, loss = binder_partition(archive, loss_ratio=loss_ratio, pi=pi, return_loss=True)
    report.kn_posterior = kn_posterior(archive)
    report.binder_partition = partition.tolist()
    report.binder_loss = loss
    return report, pi


def write_fit_report(report: FitReport, pi: np.ndarray, directory: Union[str, Path]) -> Path:
    """
    fit_report.json    every field of the report
    kn_posterior.csv   k, prob
    cpo.csv            datum, cpo, binder cluster
    coclustering.csv   n x n matrix
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "fit_report.json", "w", encoding="utf-8") as f:
        # repr floats round-trip exactly
        json.dump(report.model_dump(), f, indent=2)
    if report.kn_posterior is not None:
        pd.DataFrame({"k": report.kn_posterior.support, "prob": report.kn_posterior.probs}).to_csv(
            directory / "kn_posterior.csv", index=False, float_format=FLOAT_FORMAT
        )
    cpo = pd.DataFrame({"datum": np.arange(len(report.cpo)), "cpo": report.cpo})
    if report.binder_partition is not None:
        cpo["binder_cluster"] = report.binder_partition
    cpo.to_csv(directory / "cpo.csv", index=False, float_format=FLOAT_FORMAT)
    np.savetxt(directory / "coclustering.csv", pi, delimiter=",", fmt=FLOAT_FORMAT)
    logger.info("Fit report written", extra={"directory": str(directory)})
    return directory
