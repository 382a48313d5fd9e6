"""
Gaussian kernel with normal-inverse-gamma base measure.

P0(dmu, dsigma2) = N(dmu; m0, sigma2/kappa0) x inv-gamma(dsigma2; a, b)
"""

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import stats

from exceptions import DomainError, ModelConfigurationError
from .models import Dataset

LOG_2PI = math.log(2.0 * math.pi)


def gaussian_logpdf(y: np.ndarray, mean: np.ndarray, var: np.ndarray) -> np.ndarray:
    """Elementwise log N(y; mean, var) with broadcasting."""
    var = np.asarray(var, dtype=float)
    if np.any(var <= 0):
        raise DomainError("variance", float(np.min(var)), "kernel variance must be positive")
    return -0.5 * (LOG_2PI + np.log(var)) - 0.5 * (y - mean) ** 2 / var


@dataclass(frozen=True)
class GaussNIGModel:
    """Univariate Gaussian mixture kernel; locations are (mu, sigma2)."""
    kappa0: float = 0.01
    a: float = 2.0
    b: float = 1.0
    m0: Optional[float] = None

    name = "gauss_nig"

    def __post_init__(self):
        for key in ("kappa0", "a", "b"):
            if not getattr(self, key) > 0:
                raise DomainError(key, getattr(self, key), "must be positive")

    @property
    def location_columns(self) -> tuple[str, ...]:
        return ("mu", "sigma2")

    def bind(self, data: Dataset) -> "GaussNIGModel":
        if self.m0 is not None:
            return self
        return replace(self, m0=float(data.y.mean()))

    def _prior_mean(self) -> float:
        if self.m0 is None:
            raise ModelConfigurationError("GaussNIGModel.m0 is unset; call bind(data) first")
        return self.m0

    # ------------------------------------------------------------ kernel

    def kernel_logdensity(self, y, locations, x=None, global_params=None):
        y = np.asarray(y, dtype=float).reshape(-1, 1)
        locations = np.atleast_2d(locations)
        return gaussian_logpdf(y, locations[:, 0][None, :], locations[:, 1][None, :])

    def atom_moments(self, locations, n_points, x=None, global_params=None):
        locations = np.atleast_2d(locations)
        shape = (n_points, locations.shape[0])
        return (
            np.broadcast_to(locations[:, 0], shape).copy(),
            np.broadcast_to(locations[:, 1], shape).copy(),
        )

    # ------------------------------------------------------------ base and posterior

    def sample_base(self, rng, size, global_params=None):
        sigma2 = 1.0 / rng.gamma(self.a, 1.0 / self.b, size=size)
        mu = rng.normal(self._prior_mean(), np.sqrt(sigma2 / self.kappa0))
        return np.column_stack([mu, sigma2])

    def base_logdensity(self, locations, global_params=None):
        locations = np.atleast_2d(locations)
        mu, sigma2 = locations[:, 0], locations[:, 1]
        out = np.full(mu.shape, -np.inf)
        ok = sigma2 > 0
        out[ok] = stats.invgamma.logpdf(sigma2[ok], self.a, scale=self.b) + stats.norm.logpdf(
            mu[ok], self._prior_mean(), np.sqrt(sigma2[ok] / self.kappa0)
        )
        return out

    def posterior_params(self, y: np.ndarray) -> tuple[float, float, float, float]:
        """(m_n, kappa_n, a_n, b_n) of the NIG posterior given cluster data y."""
        y = np.asarray(y, dtype=float)
        n = y.size
        m0 = self._prior_mean()
        if n == 0:
            return m0, self.kappa0, self.a, self.b
        ybar = float(y.mean())
        kappa_n = self.kappa0 + n
        m_n = (self.kappa0 * m0 + n * ybar) / kappa_n
        a_n = self.a + 0.5 * n
        b_n = (
            self.b
            + 0.5 * float(np.sum((y - ybar) ** 2))
            + self.kappa0 * n * (ybar - m0) ** 2 / (2.0 * kappa_n)
        )
        return m_n, kappa_n, a_n, b_n

    def sample_allocated_location(self, y, x, rng, global_params=None, current=None):
        m_n, kappa_n, a_n, b_n = self.posterior_params(y)
        sigma2 = 1.0 / rng.gamma(a_n, 1.0 / b_n)
        mu = rng.normal(m_n, math.sqrt(sigma2 / kappa_n))
        return np.array([mu, sigma2])

    # ------------------------------------------------------------ global parameters

    def initial_global_params(self, rng):
        return {}

    def update_global_params(self, data, allocated_locations, rng, global_params):
        return global_params
