"""
Posterior predictive densities h(y) = sum_j P_j f(y; tau_j) on a grid.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Protocol

import numpy as np
import pandas as pd
from scipy import special

from exceptions import DomainError
from .base import MixtureModel


class SweepDraw(Protocol):
    """What a kept sweep exposes to predictive computations."""
    weights: np.ndarray
    locations: np.ndarray
    global_params: dict


@dataclass
class PredictiveGrid:
    """Pointwise posterior mean and 90% band of the predictive density."""
    grid: np.ndarray
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    x: Optional[np.ndarray] = None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"y": self.grid, "mean": self.mean, "q05": self.lower, "q95": self.upper})

    def to_dict(self) -> dict:
        return {
            "x": None if self.x is None else self.x.tolist(),
            "grid": self.grid.tolist(),
            "mean": self.mean.tolist(),
            "q05": self.lower.tolist(),
            "q95": self.upper.tolist(),
        }


def sweep_logdensity(
    model: MixtureModel,
    sweep: SweepDraw,
    y: np.ndarray,
    x: Optional[np.ndarray] = None,
) -> np.ndarray:
    """log h_s(y) for one sweep at every y (covariates per point or one shared vector)."""
    log_kernel = model.kernel_logdensity(y, sweep.locations, x, sweep.global_params)
    with np.errstate(divide="ignore"):
        log_w = np.log(sweep.weights)
    return special.logsumexp(log_kernel + log_w[None, :], axis=1)


def predictive_density_grid(
    sweeps: Iterable[SweepDraw],
    model: MixtureModel,
    grid: np.ndarray,
    x: Optional[np.ndarray] = None,
    quantiles: tuple[float, float] = (0.05, 0.95),
) -> PredictiveGrid:
    """
    Evaluate h(y) on ``grid`` for every kept sweep and summarize.

    Args:
        sweeps: Kept sweeps (weights, locations, global_params)
        model: Mixture model the chain was run with
        grid: Response values
        x: One covariate vector shared by all grid points (linear dependent model)
        quantiles: Band limits

    Returns:
        PredictiveGrid with mean and pointwise quantiles
    """
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise DomainError("grid", 0, "grid is empty")
    x_arr = None if x is None else np.atleast_2d(np.asarray(x, dtype=float))
    dens = np.array([np.exp(sweep_logdensity(model, s, grid, x_arr)) for s in sweeps])
    if dens.size == 0:
        raise DomainError("sweeps", 0, "archive has no kept sweeps")
    lower, upper = np.quantile(dens, quantiles, axis=0)
    return PredictiveGrid(
        grid=grid,
        mean=dens.mean(axis=0),
        lower=lower,
        upper=upper,
        x=None if x_arr is None else x_arr[0],
    )
