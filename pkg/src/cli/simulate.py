"""
Synthetic datasets: the five-Gaussian reference mixture, two linear regimes
and an AIS-shaped table (lbm on rcc, Ht, Wt).
"""

from typing import Optional

import numpy as np
from scipy import stats

from mixture import Dataset

# (mean, sd) and unnormalized weights of the reference mixture
REFERENCE_COMPONENTS: tuple[tuple[float, float], ...] = (
    (15.0, 1.1),
    (50.0, 1.0),
    (20.0, 4.0),
    (30.0, 5.0),
    (40.0, 5.0),
)
REFERENCE_WEIGHTS: tuple[float, ...] = (10.0, 9.0, 4.0, 5.0, 5.0)

# intercept, slope of the two regimes
TWO_REGIME_COEFFICIENTS: tuple[tuple[float, float], ...] = ((0.0, 1.0), (15.0, 1.0))
TWO_REGIME_SD = 0.5


def reference_weights() -> np.ndarray:
    w = np.asarray(REFERENCE_WEIGHTS)
    return w / w.sum()


def reference_mean() -> float:
    """sum_i w_i mu_i of the reference mixture."""
    return float(reference_weights() @ np.array([m for m, _ in REFERENCE_COMPONENTS]))


def reference_density(grid: np.ndarray) -> np.ndarray:
    """True density of the reference mixture on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    means = np.array([m for m, _ in REFERENCE_COMPONENTS])
    sds = np.array([s for _, s in REFERENCE_COMPONENTS])
    return stats.norm.pdf(grid[:, None], means[None, :], sds[None, :]) @ reference_weights()


def simulate_reference_data(seed: int, n: int = 1000) -> Dataset:
    """n iid draws from the five-Gaussian reference mixture."""
    rng = np.random.default_rng(seed)
    comp = rng.choice(len(REFERENCE_COMPONENTS), size=n, p=reference_weights())
    means = np.array([m for m, _ in REFERENCE_COMPONENTS])[comp]
    sds = np.array([s for _, s in REFERENCE_COMPONENTS])[comp]
    return Dataset(y=rng.normal(means, sds), response="y")


def simulate_two_regime(seed: int, n: int = 200, return_labels: bool = False):
    """
    y = a_r + b_r x + N(0, 0.5^2) with x ~ U(0, 10) and regime r drawn with
    probability 1/2 each.
    """
    rng = np.random.default_rng(seed)
    regime = rng.integers(0, 2, size=n)
    x = rng.uniform(0.0, 10.0, size=n)
    coef = np.array(TWO_REGIME_COEFFICIENTS)[regime]
    y = coef[:, 0] + coef[:, 1] * x + rng.normal(0.0, TWO_REGIME_SD, size=n)
    data = Dataset(y=y, X=x.reshape(-1, 1), response="y", covariates=("x",))
    return (data, regime) if return_labels else data


def simulate_ais_like(seed: int, n: Optional[int] = None) -> Dataset:
    """
    Stand-in for the athletes table: about half females, lean body mass
    linear in red cell count, height and weight with a sex offset.
    """
    n = 202 if n is None else n
    rng = np.random.default_rng(seed)
    male = rng.random(n) < 0.5
    ht = np.where(male, rng.normal(186.0, 8.0, n), rng.normal(175.0, 8.0, n))
    wt = np.where(male, rng.normal(82.0, 12.0, n), rng.normal(67.0, 9.0, n))
    rcc = np.where(male, rng.normal(5.0, 0.3, n), rng.normal(4.4, 0.3, n))
    lbm = -15.0 + 2.5 * rcc + 0.1 * ht + 0.6 * wt + np.where(male, 6.0, 0.0) + rng.normal(0.0, 2.5, n)
    return Dataset(
        y=lbm,
        X=np.column_stack([rcc, ht, wt]),
        response="lbm",
        covariates=("rcc", "Ht", "Wt"),
    )


def simulate_dataset(kind: str, seed: int, n: Optional[int] = None) -> Dataset:
    if kind == "five_gaussian":
        return simulate_reference_data(seed, n or 1000)
    if kind == "two_regime":
        return simulate_two_regime(seed, n or 200)
    if kind == "ais_like":
        return simulate_ais_like(seed, n)
    raise ValueError(f"Unknown simulated dataset: {kind}")
