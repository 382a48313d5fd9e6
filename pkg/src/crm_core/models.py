"""
Data models for crm_core.
"""

import threading
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from exceptions import DomainError


# ============================================================================
# Truncation and realizations
# ============================================================================

@dataclass(frozen=True)
class TruncationSpec:
    """Jump threshold ε and total-mass multiplier κ of an ε-NormCRM."""
    epsilon: float
    kappa: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon", self.epsilon, "threshold must be positive")
        if not self.kappa > 0:
            raise DomainError("kappa", self.kappa, "kappa must be positive")

    def with_kappa(self, kappa: float) -> "TruncationSpec":
        return TruncationSpec(epsilon=self.epsilon, kappa=kappa)

    def with_epsilon(self, epsilon: float) -> "TruncationSpec":
        return TruncationSpec(epsilon=epsilon, kappa=self.kappa)


@dataclass
class EpsRealization:
    """
    One draw of the truncated measure.

    Atoms are J_0..J_N with locations tau_0..tau_N; ``weights`` are the
    normalized jumps P_j = J_j / T.
    """
    jumps: np.ndarray
    locations: np.ndarray
    epsilon: float
    total_mass: float = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        self.jumps = np.asarray(self.jumps, dtype=float)
        self.locations = np.atleast_2d(np.asarray(self.locations, dtype=float))
        if self.locations.shape[0] != self.jumps.shape[0]:
            # single-coordinate locations passed as a flat vector
            self.locations = self.locations.reshape(self.jumps.shape[0], -1)
        if self.jumps.size == 0:
            raise DomainError("jumps", self.jumps.size, "a realization has at least one atom")
        if np.any(self.jumps <= self.epsilon):
            raise DomainError("jumps", float(self.jumps.min()), f"every jump must exceed {self.epsilon}")
        self.total_mass = float(self.jumps.sum())
        self.weights = self.jumps / self.total_mass

    @property
    def n_atoms(self) -> int:
        return int(self.jumps.size)

    @property
    def n_eps(self) -> int:
        """Number of Poisson jumps above ε (atoms minus the extra J_0)."""
        return self.n_atoms - 1

    def measure_of(self, indicator: np.ndarray) -> float:
        """P_ε(B) for B given as a boolean mask over atoms."""
        return float(self.weights[np.asarray(indicator, dtype=bool)].sum())

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "n_atoms": self.n_atoms,
            "total_mass": self.total_mass,
            "jumps": self.jumps.tolist(),
            "weights": self.weights.tolist(),
            "locations": self.locations.tolist(),
        }


# ============================================================================
# Config-side description of an intensity
# ============================================================================

IntensityKind = Literal["gamma", "gengamma", "bessel"]


class IntensityConfig(BaseModel):
    """Intensity family as written in run configs."""
    kind: IntensityKind = "bessel"
    omega: float = Field(1.05, gt=0)          # exponential tilt; >= 1 for bessel
    sigma: float = Field(0.0, ge=0, lt=1)     # gengamma discount parameter

    @model_validator(mode="after")
    def _check_family(self) -> "IntensityConfig":
        if self.kind == "bessel" and self.omega < 1:
            raise ValueError("bessel intensity requires omega >= 1")
        return self

    def build(self):
        from .intensity import build_intensity
        return build_intensity(self.kind, omega=self.omega, sigma=self.sigma)


@dataclass
class SamplingStats:
    """Counters for the jump samplers; safe to update from several chains at once."""
    proposals: int = 0
    accepted: int = 0
    degraded_draws: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def acceptance_rate(self) -> Optional[float]:
        return self.accepted / self.proposals if self.proposals else None

    def record(self, proposals: int, accepted: int) -> None:
        with self._lock:
            self.proposals += proposals
            self.accepted += accepted

    def record_degraded(self, count: int) -> None:
        with self._lock:
            self.degraded_draws += count

    def reset(self) -> None:
        with self._lock:
            self.proposals = 0
            self.accepted = 0
            self.degraded_draws = 0

    def to_dict(self) -> dict:
        with self._lock:
            return {
                "proposals": self.proposals,
                "accepted": self.accepted,
                "degraded_draws": self.degraded_draws,
                "acceptance_rate": self.acceptance_rate,
            }


SAMPLING_STATS = SamplingStats()
