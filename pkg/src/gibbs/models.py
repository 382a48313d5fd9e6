"""
Data models for gibbs: chain configuration, sampler state and kept sweeps.
"""

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from config import settings
from crm_core import IntensityConfig
from exceptions import DomainError


# ============================================================================
# Configuration
# ============================================================================

class EpsilonPrior(BaseModel):
    """Prior on the truncation threshold for the optional random-eps step."""
    kind: Literal["log_uniform", "uniform", "point"] = "log_uniform"
    lower: float = Field(1e-8, gt=0)
    upper: float = Field(1e-4, gt=0)

    @model_validator(mode="after")
    def _check_support(self) -> "EpsilonPrior":
        if self.kind != "point" and not self.lower < self.upper:
            raise ValueError("epsilon prior needs lower < upper")
        return self

    def contains(self, epsilon: float) -> bool:
        return self.lower <= epsilon <= self.upper

    def log_density(self, epsilon: float) -> float:
        """Unnormalized log pi(eps)."""
        if not self.contains(epsilon):
            return -math.inf
        return -math.log(epsilon) if self.kind == "log_uniform" else 0.0


class ChainConfig(BaseModel):
    """Schedule and prior settings of one Gibbs chain."""
    n_burnin: int = Field(5000, ge=0)
    n_samples: int = Field(5000, ge=1)
    thinning: int = Field(10, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    epsilon: float = Field(default_factory=lambda: settings.default_epsilon, gt=0)
    kappa: float = Field(0.11, gt=0)
    intensity: IntensityConfig = Field(default_factory=IntensityConfig)
    epsilon_prior: Optional[EpsilonPrior] = None
    n_chains: int = Field(1, ge=1)
    progress_every: int = Field(1000, ge=1)

    @property
    def n_sweeps(self) -> int:
        return self.n_burnin + self.n_samples * self.thinning

    def is_kept(self, sweep: int) -> bool:
        """Sweeps are counted from 1."""
        after = sweep - self.n_burnin
        return after > 0 and after % self.thinning == 0


# ============================================================================
# State
# ============================================================================

@dataclass
class GibbsState:
    """
    Current values of all blocked-Gibbs components.

    Atoms 0..k-1 are allocated (atom i carries cluster i), atoms k.. are
    non-allocated. ``allocations[i]`` is the atom index of datum i.
    """
    u: float
    allocations: np.ndarray
    jumps: np.ndarray
    locations: np.ndarray
    k: int
    epsilon: float
    iteration: int = 0
    global_params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.allocations.size)

    @property
    def n_atoms(self) -> int:
        return int(self.jumps.size)

    @property
    def n_na(self) -> int:
        return self.n_atoms - self.k

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.allocations, minlength=self.k)[: self.k]

    @property
    def total_mass(self) -> float:
        return float(self.jumps.sum())

    @property
    def weights(self) -> np.ndarray:
        return self.jumps / self.total_mass

    def check_invariants(self) -> None:
        """Raise DomainError when the state breaks the allocated/non-allocated contract."""
        counts = self.counts
        if self.k < 1 or counts.sum() != self.n or np.any(counts < 1):
            raise DomainError("allocations", counts.tolist(), "clusters must be the first k atoms and non-empty")
        if self.allocations.max() >= self.k:
            raise DomainError("allocations", int(self.allocations.max()), "datum allocated to a non-allocated atom")
        if not np.all(self.jumps > self.epsilon):
            raise DomainError("jumps", float(self.jumps.min()), f"every jump must exceed {self.epsilon}")
        if self.locations.shape[0] != self.n_atoms or not np.all(np.isfinite(self.locations)):
            raise DomainError("locations", self.locations.shape, "one finite location per atom")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise DomainError("weights", float(self.weights.sum()), "weights must sum to one")

    def snapshot(self) -> dict:
        return {
            "iteration": self.iteration,
            "u": self.u,
            "k": self.k,
            "n_na": self.n_na,
            "epsilon": self.epsilon,
            "counts": self.counts.tolist() if self.k else [],
            "jumps": self.jumps.tolist(),
            "locations": self.locations.tolist(),
            "global_params": dict(self.global_params),
        }

    def to_record(self) -> "SweepRecord":
        return SweepRecord(
            iteration=self.iteration,
            u=self.u,
            k=self.k,
            epsilon=self.epsilon,
            jumps=self.jumps.copy(),
            weights=self.weights,
            locations=self.locations.copy(),
            allocations=self.allocations.copy(),
            global_params=dict(self.global_params),
        )


@dataclass
class SweepRecord:
    """One kept sweep of a chain."""
    iteration: int
    u: float
    k: int
    epsilon: float
    jumps: np.ndarray
    weights: np.ndarray
    locations: np.ndarray
    allocations: np.ndarray
    global_params: dict = field(default_factory=dict)

    @property
    def n_na(self) -> int:
        return int(self.jumps.size) - self.k

    @property
    def total_mass(self) -> float:
        return float(self.jumps.sum())

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.allocations, minlength=self.k)[: self.k]

    def trace_row(self) -> dict:
        return {
            "iteration": self.iteration,
            "k": self.k,
            "u": self.u,
            "n_na": self.n_na,
            "total_mass": self.total_mass,
            "epsilon": self.epsilon,
            **self.global_params,
        }
