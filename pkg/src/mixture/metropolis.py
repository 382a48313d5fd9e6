"""
Random-walk Metropolis-Hastings update for allocated locations.

Used by models configured with ``location_update="metropolis"`` instead of
their exact conjugate draw. The target is

    prod_{j in C} f(y_j; tau) P0(dtau)

and the walk is Gaussian in unconstrained coordinates: columns listed in
``positive_columns`` move on the log scale, with the matching Jacobian in
the acceptance ratio.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from exceptions import DomainError
from .base import MixtureModel


@dataclass(frozen=True)
class RandomWalkProposal:
    """Step size and number of steps per sweep of the location random walk."""
    scale: float = 0.1
    steps: int = 5
    positive_columns: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("scale", self.scale, "random-walk scale must be positive")
        if self.steps < 1:
            raise DomainError("steps", self.steps, "must be >= 1")

    def propose(self, current: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        z = np.array(current, dtype=float)
        cols = list(self.positive_columns)
        z[cols] = np.log(z[cols])
        z = z + self.scale * rng.standard_normal(z.size)
        z[cols] = np.exp(z[cols])
        return z

    def log_jacobian(self, location: np.ndarray) -> float:
        return float(np.sum(np.log(location[list(self.positive_columns)])))


def location_log_target(
    model: MixtureModel,
    y: np.ndarray,
    x: Optional[np.ndarray],
    location: np.ndarray,
    global_params: Optional[dict] = None,
) -> float:
    """log prod_j f(y_j; tau) + log p0(tau) for one location tau."""
    location = np.atleast_2d(np.asarray(location, dtype=float))
    base = float(model.base_logdensity(location, global_params)[0])
    if not math.isfinite(base):
        return -math.inf
    return float(model.kernel_logdensity(y, location, x, global_params).sum()) + base


def log_acceptance_ratio(
    model: MixtureModel,
    y: np.ndarray,
    x: Optional[np.ndarray],
    current: np.ndarray,
    proposal: np.ndarray,
    walk: RandomWalkProposal,
    global_params: Optional[dict] = None,
) -> float:
    """log of min(1, acceptance ratio); 0 when the proposal equals the current point."""
    if np.array_equal(current, proposal):
        return 0.0
    value = (
        location_log_target(model, y, x, proposal, global_params)
        + walk.log_jacobian(proposal)
        - location_log_target(model, y, x, current, global_params)
        - walk.log_jacobian(current)
    )
    return min(0.0, value) if not math.isnan(value) else -math.inf


def metropolis_location(
    model: MixtureModel,
    y: np.ndarray,
    x: Optional[np.ndarray],
    rng: np.random.Generator,
    current: np.ndarray,
    walk: RandomWalkProposal,
    global_params: Optional[dict] = None,
) -> tuple[np.ndarray, int]:
    """
    ``walk.steps`` random-walk updates of one allocated location.

    Returns:
        (new location, number of accepted steps)
    """
    location = np.array(current, dtype=float)
    accepted = 0
    for _ in range(walk.steps):
        proposal = walk.propose(location, rng)
        log_ratio = log_acceptance_ratio(model, y, x, location, proposal, walk, global_params)
        if rng.random() < math.exp(log_ratio):
            location = proposal
            accepted += 1
    return location, accepted
