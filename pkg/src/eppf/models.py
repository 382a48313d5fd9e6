"""
Data models for eppf: compositions, K_n laws, calibration targets and results.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from exceptions import DomainError


@dataclass(frozen=True)
class Composition:
    """Block sizes (n_1, ..., n_k) of a partition of n items."""
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise DomainError("counts", counts, "a composition has at least one block")
        if any(c < 1 for c in counts):
            raise DomainError("counts", counts, "every block size must be >= 1")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def of(cls, *counts: int) -> "Composition":
        return cls(tuple(counts))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    def canonical(self) -> "Composition":
        """Same partition type with block sizes in decreasing order."""
        return Composition(tuple(sorted(self.counts, reverse=True)))

    def set_partition_count(self) -> int:
        """Number of set partitions of {1..n} with these block sizes."""
        total = math.factorial(self.n)
        for c in self.counts:
            total //= math.factorial(c)
        for mult in Counter(self.counts).values():
            total //= math.factorial(mult)
        return total

    def grow(self, block: Optional[int] = None) -> "Composition":
        """Add one item to block ``block`` or, with None, open a new block."""
        counts = list(self.counts)
        if block is None:
            counts.append(1)
        else:
            counts[block] += 1
        return Composition(tuple(counts))

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.counts) + ")"


@dataclass
class KnDistribution:
    """
    Law of the number of distinct values K_n in a sample of size n.

    ``probs[k-1]`` is P(K_n = k); ``se`` holds Monte Carlo standard errors
    (zeros for exact enumeration).
    """
    n: int
    probs: np.ndarray
    se: np.ndarray
    method: Literal["exact", "monte_carlo"] = "monte_carlo"
    reps: int = 0
    mean_se: float = 0.0
    support: np.ndarray = field(init=False)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        self.se = np.asarray(self.se, dtype=float)
        if self.probs.shape != (self.n,) or self.se.shape != (self.n,):
            raise DomainError("probs", self.probs.shape, f"expected {self.n} entries")
        if np.any(self.probs < 0):
            raise DomainError("probs", float(self.probs.min()), "probabilities must be nonnegative")
        self.support = np.arange(1, self.n + 1)

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    @property
    def sd(self) -> float:
        second = float(np.dot(self.support ** 2, self.probs))
        return math.sqrt(max(second - self.mean ** 2, 0.0))

    @property
    def mode(self) -> int:
        return int(self.support[np.argmax(self.probs)])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "method": self.method,
            "reps": self.reps,
            "mean": self.mean,
            "mean_se": self.mean_se,
            "sd": self.sd,
            "mode": self.mode,
            "probs": self.probs.tolist(),
            "se": self.se.tolist(),
        }


# ============================================================================
# Calibration
# ============================================================================

class CalibrationTarget(BaseModel):
    """What calibrate_kappa should hit: p_eps(2) = value or E(K_n) = value."""
    kind: Literal["pair_tie", "expected_kn"] = "pair_tie"
    value: float = Field(..., gt=0)
    n: Optional[int] = Field(None, ge=2)

    @model_validator(mode="after")
    def _check_target(self) -> "CalibrationTarget":
        if self.kind == "pair_tie" and not self.value < 1:
            raise ValueError("pair tie probability target must lie in (0, 1)")
        if self.kind == "expected_kn":
            if self.n is None:
                raise ValueError("expected_kn target needs the sample size n")
            if not 1 < self.value < self.n:
                raise ValueError(f"expected_kn target must lie in (1, {self.n})")
        return self


class CalibrationResult(BaseModel):
    """Outcome of a kappa calibration."""
    family: str
    params: dict
    epsilon: float
    target: CalibrationTarget
    kappa: float
    achieved: float
    kn_sd: Optional[float] = None
    bracket: tuple[float, float]
    iterations: int
    converged: bool
    seed: Optional[int] = None
    reps: Optional[int] = None


@dataclass(frozen=True)
class CalibrationPreset:
    """Named (omega, kappa) setting of the Bessel intensity with the target it was tuned for."""
    name: str
    omega: float
    kappa: float
    target: CalibrationTarget
    prior_kn_sd: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "omega": self.omega,
            "kappa": self.kappa,
            "target": self.target.model_dump(),
            "prior_kn_sd": self.prior_kn_sd,
        }

