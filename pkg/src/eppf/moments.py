"""
Monte Carlo counterparts of the prior moments of P_eps(B).
"""

import math
from dataclasses import dataclass

import numpy as np

from crm_core import Intensity, TruncationSpec, sample_prior_jump_sets
from exceptions import DomainError


@dataclass
class MomentEstimate:
    """Monte Carlo estimate of (E P(B1), Var P(B1), Cov(P(B1), P(B2))) with standard errors."""
    mean: float
    var: float
    cov: float
    mean_se: float
    var_se: float
    cov_se: float
    reps: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def prior_moments_monte_carlo(
    intensity: Intensity,
    trunc: TruncationSpec,
    p0_masses: tuple[float, float, float],
    reps: int,
    rng: np.random.Generator,
) -> MomentEstimate:
    """
    Moments of P_eps(B1), P_eps(B2) from simulated realizations.

    Locations enter only through which of the four cells
    (B1 & B2, B1 only, B2 only, neither) each atom falls in, so each atom
    gets a cell drawn from the P0 masses.
    """
    b1, b2, both = p0_masses
    cells = np.array([both, b1 - both, b2 - both, 1.0 - b1 - b2 + both])
    if np.any(cells < -1e-12):
        raise DomainError("p0_masses", p0_masses, "masses are not consistent")
    cells = np.clip(cells, 0.0, None)
    cells /= cells.sum()

    p1 = np.empty(reps)
    p2 = np.empty(reps)
    for r, jumps in enumerate(sample_prior_jump_sets(intensity, trunc, reps, rng)):
        weights = jumps / jumps.sum()
        cell = rng.choice(4, size=weights.size, p=cells)
        in_both = weights[cell == 0].sum()
        p1[r] = in_both + weights[cell == 1].sum()
        p2[r] = in_both + weights[cell == 2].sum()

    c1 = p1 - p1.mean()
    c2 = p2 - p2.mean()
    sq = c1 ** 2
    cross = c1 * c2
    root = math.sqrt(reps)
    return MomentEstimate(
        mean=float(p1.mean()),
        var=float(sq.mean()),
        cov=float(cross.mean()),
        mean_se=float(p1.std(ddof=1) / root),
        var_se=float(sq.std(ddof=1) / root),
        cov_se=float(cross.std(ddof=1) / root),
        reps=reps,
    )
