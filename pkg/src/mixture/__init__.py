"""
mixture - kernels and base measures for ε-NormCRM mixtures.

Models:
- GaussNIGModel: Gaussian kernel, normal-inverse-gamma base on (mu, sigma2)
- LinDepModel: Gaussian kernel with mean x'theta (linear dependent model)

Both implement the MixtureModel protocol consumed by gibbs and diagnostics.
LinDepModel can replace its conjugate location draw by the random walk in
metropolis.
"""

from .models import (
    Dataset,
    GaussNIGConfig,
    LinDepConfig,
    LocationUpdate,
    ModelConfig,
    VarianceMode,
)
from .base import MixtureModel
from .gauss_nig import GaussNIGModel, gaussian_logpdf
from .lindep import LinDepModel
from .metropolis import RandomWalkProposal, location_log_target, log_acceptance_ratio, metropolis_location
from .predictive import PredictiveGrid, SweepDraw, predictive_density_grid, sweep_logdensity

__all__ = [
    # Models
    "Dataset",
    "GaussNIGConfig",
    "LinDepConfig",
    "LocationUpdate",
    "ModelConfig",
    "VarianceMode",
    # Core
    "MixtureModel",
    "GaussNIGModel",
    "LinDepModel",
    "gaussian_logpdf",
    # Metropolis-Hastings locations
    "RandomWalkProposal",
    "location_log_target",
    "log_acceptance_ratio",
    "metropolis_location",
    # Predictive
    "PredictiveGrid",
    "SweepDraw",
    "predictive_density_grid",
    "sweep_logdensity",
]
