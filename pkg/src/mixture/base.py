"""
MixtureModel - interface between the Gibbs sampler and a kernel/base-measure pair.

Locations are rows of a float array whose layout is fixed per model
(``location_columns``). Model-wide parameters that are not attached to
atoms travel in a ``global_params`` dict.
"""

from typing import Optional, Protocol, runtime_checkable

import numpy as np

from .models import Dataset


@runtime_checkable
class MixtureModel(Protocol):
    """Interface for mixture kernels f(y; tau) with base measure P0."""

    name: str

    @property
    def location_columns(self) -> tuple[str, ...]:
        """Names of the location coordinates."""
        ...

    def bind(self, data: Dataset) -> "MixtureModel":
        """Copy with data-dependent defaults resolved (prior mean, covariate scaling)."""
        ...

    def kernel_logdensity(
        self,
        y: np.ndarray,
        locations: np.ndarray,
        x: Optional[np.ndarray] = None,
        global_params: Optional[dict] = None,
    ) -> np.ndarray:
        """log f(y_i; tau_j) as an (n, m) array."""
        ...

    def sample_base(
        self, rng: np.random.Generator, size: int, global_params: Optional[dict] = None
    ) -> np.ndarray:
        """``size`` iid draws from P0 as a (size, dim) array."""
        ...

    def base_logdensity(self, locations: np.ndarray, global_params: Optional[dict] = None) -> np.ndarray:
        """log density of P0 at each location row; -inf outside the support."""
        ...

    def sample_allocated_location(
        self,
        y: np.ndarray,
        x: Optional[np.ndarray],
        rng: np.random.Generator,
        global_params: Optional[dict] = None,
        current: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """
        Draw from prod_{j in C} f(y_j; tau) P0(dtau) for one cluster, either
        exactly or by Metropolis-Hastings steps from ``current``.
        """
        ...

    def initial_global_params(self, rng: np.random.Generator) -> dict:
        """Starting values of model-wide parameters."""
        ...

    def update_global_params(
        self,
        data: Dataset,
        allocated_locations: np.ndarray,
        rng: np.random.Generator,
        global_params: dict,
    ) -> dict:
        """Full-conditional update of model-wide parameters given each datum's location."""
        ...

    def atom_moments(
        self,
        locations: np.ndarray,
        n_points: int,
        x: Optional[np.ndarray] = None,
        global_params: Optional[dict] = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Kernel mean and variance for every (point, atom) pair, each (n_points, m)."""
        ...
