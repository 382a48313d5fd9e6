"""
Linear dependent model - Gaussian kernel with mean x'theta.

Locations carry the coefficients theta (intercept first) and, in the
``in_locations`` variance mode, the kernel variance eta2 as a last
column. In ``parametric`` mode eta2 is shared by all atoms and lives in
``global_params["eta2"]``.

Base measure: theta ~ N(b0, Sigma0) x eta2 ~ inv-gamma(nu0/2, nu0 eta0^2/2).

Allocated locations are drawn from their conjugate full conditional, or
with ``location_update="metropolis"`` moved by a random walk (log scale
for eta2).
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import linalg, stats

from exceptions import DomainError, ModelConfigurationError
from .gauss_nig import gaussian_logpdf
from .metropolis import RandomWalkProposal, metropolis_location
from .models import Dataset, LocationUpdate, VarianceMode

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LinDepModel:
    b0: np.ndarray
    sigma0: np.ndarray
    nu0: float = 4.0
    eta0_sq: float = 1.0
    variance_mode: VarianceMode = "in_locations"
    standardize: bool = False
    x_center: Optional[np.ndarray] = None
    x_scale: Optional[np.ndarray] = None
    location_update: LocationUpdate = "conjugate"
    rw_scale: float = 0.1
    rw_steps: int = 5
    _sigma0_inv: np.ndarray = field(init=False, repr=False)
    _sigma0_chol: np.ndarray = field(init=False, repr=False)

    name = "lindep"

    def __post_init__(self):
        b0 = np.asarray(self.b0, dtype=float).reshape(-1)
        sigma0 = np.asarray(self.sigma0, dtype=float)
        if sigma0.shape != (b0.size, b0.size):
            raise DomainError("sigma0", sigma0.shape, f"expected {b0.size}x{b0.size}")
        try:
            chol = np.linalg.cholesky(sigma0)
        except np.linalg.LinAlgError:
            raise DomainError("sigma0", "not SPD", "prior covariance must be positive definite")
        if not (self.nu0 > 0 and self.eta0_sq > 0):
            raise DomainError("(nu0, eta0_sq)", (self.nu0, self.eta0_sq), "must be positive")
        if self.variance_mode not in ("in_locations", "parametric"):
            raise DomainError("variance_mode", self.variance_mode, "unknown variance mode")
        if self.location_update not in ("conjugate", "metropolis"):
            raise DomainError("location_update", self.location_update, "unknown location update")
        if not (self.rw_scale > 0 and self.rw_steps >= 1):
            raise DomainError("(rw_scale, rw_steps)", (self.rw_scale, self.rw_steps), "need scale > 0 and steps >= 1")
        object.__setattr__(self, "b0", b0)
        object.__setattr__(self, "sigma0", sigma0)
        object.__setattr__(self, "_sigma0_chol", chol)
        object.__setattr__(self, "_sigma0_inv", linalg.cho_solve((chol, True), np.eye(b0.size)))

    # ------------------------------------------------------------ layout

    @property
    def n_coefficients(self) -> int:
        return int(self.b0.size)

    @property
    def eta_in_locations(self) -> bool:
        return self.variance_mode == "in_locations"

    @property
    def location_columns(self) -> tuple[str, ...]:
        cols = tuple(f"theta{j}" for j in range(self.n_coefficients))
        return cols + ("eta2",) if self.eta_in_locations else cols

    def bind(self, data: Dataset) -> "LinDepModel":
        if data.p != self.n_coefficients - 1:
            raise ModelConfigurationError(
                f"b0 has {self.n_coefficients} entries but the data has {data.p} covariates"
            )
        if not self.standardize or self.x_center is not None:
            return self
        scale = data.X.std(axis=0, ddof=1) if data.n > 1 else np.ones(data.p)
        scale = np.where(scale > 0, scale, 1.0)
        return replace(self, x_center=data.X.mean(axis=0), x_scale=scale)

    def design(self, x: Optional[np.ndarray], n_points: int) -> np.ndarray:
        """Intercept-augmented (and optionally z-scored) design matrix."""
        if self.n_coefficients == 1:
            return np.ones((n_points, 1))
        if x is None:
            raise ModelConfigurationError("linear dependent model needs covariates")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[0] == 1 and n_points > 1:
            x = np.repeat(x, n_points, axis=0)
        if self.standardize:
            if self.x_center is None:
                raise ModelConfigurationError("standardize=True requires bind(data) first")
            x = (x - self.x_center) / self.x_scale
        return np.column_stack([np.ones(x.shape[0]), x])

    def split(self, locations: np.ndarray, global_params: Optional[dict]) -> tuple[np.ndarray, np.ndarray]:
        """(theta rows, eta2 per atom)."""
        locations = np.atleast_2d(locations)
        q = self.n_coefficients
        theta = locations[:, :q]
        if self.eta_in_locations:
            return theta, locations[:, q]
        if not global_params or "eta2" not in global_params:
            raise ModelConfigurationError("parametric variance mode needs global_params['eta2']")
        return theta, np.full(locations.shape[0], float(global_params["eta2"]))

    # ------------------------------------------------------------ kernel

    def kernel_logdensity(self, y, locations, x=None, global_params=None):
        y = np.asarray(y, dtype=float).reshape(-1, 1)
        theta, eta2 = self.split(locations, global_params)
        mean = self.design(x, y.shape[0]) @ theta.T
        return gaussian_logpdf(y, mean, eta2[None, :])

    def atom_moments(self, locations, n_points, x=None, global_params=None):
        theta, eta2 = self.split(locations, global_params)
        mean = self.design(x, n_points) @ theta.T
        return mean, np.broadcast_to(eta2, mean.shape).copy()

    # ------------------------------------------------------------ draws

    def _sample_eta2_prior(self, rng: np.random.Generator, size=None):
        return 1.0 / rng.gamma(0.5 * self.nu0, 2.0 / (self.nu0 * self.eta0_sq), size=size)

    def sample_base(self, rng, size, global_params=None):
        z = rng.standard_normal((size, self.n_coefficients))
        theta = self.b0 + z @ self._sigma0_chol.T
        if not self.eta_in_locations:
            return theta
        return np.column_stack([theta, self._sample_eta2_prior(rng, size)])

    def base_logdensity(self, locations, global_params=None):
        locations = np.atleast_2d(locations)
        theta = locations[:, : self.n_coefficients]
        out = stats.multivariate_normal.logpdf(theta, mean=self.b0, cov=self.sigma0)
        out = np.atleast_1d(np.asarray(out, dtype=float)).copy()
        if self.eta_in_locations:
            eta2 = locations[:, self.n_coefficients]
            ok = eta2 > 0
            out[~ok] = -np.inf
            out[ok] += stats.invgamma.logpdf(
                eta2[ok], 0.5 * self.nu0, scale=0.5 * self.nu0 * self.eta0_sq
            )
        return out

    @property
    def random_walk(self) -> RandomWalkProposal:
        positive = (self.n_coefficients,) if self.eta_in_locations else ()
        return RandomWalkProposal(scale=self.rw_scale, steps=self.rw_steps, positive_columns=positive)

    def coefficient_posterior(
        self, y: np.ndarray, design: np.ndarray, eta2: float
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Mean and Cholesky factor (lower) of the precision of theta | eta2, data.

        V = (Sigma0^-1 + D'D/eta2)^-1, mean = V (Sigma0^-1 b0 + D'y/eta2)
        """
        precision = self._sigma0_inv + design.T @ design / eta2
        chol = np.linalg.cholesky(precision)
        rhs = self._sigma0_inv @ self.b0 + design.T @ y / eta2
        return linalg.cho_solve((chol, True), rhs), chol

    def sample_coefficients(self, y, design, eta2, rng) -> np.ndarray:
        mean, chol = self.coefficient_posterior(y, design, eta2)
        z = rng.standard_normal(mean.size)
        return mean + linalg.solve_triangular(chol.T, z, lower=False)

    def sample_eta2(self, residuals: np.ndarray, rng: np.random.Generator) -> float:
        """eta2 | theta ~ inv-gamma(nu0/2 + n/2, nu0 eta0^2/2 + ||r||^2/2)."""
        shape = 0.5 * (self.nu0 + residuals.size)
        rate = 0.5 * (self.nu0 * self.eta0_sq + float(residuals @ residuals))
        return 1.0 / rng.gamma(shape, 1.0 / rate)

    def sample_allocated_location(self, y, x, rng, global_params=None, current=None):
        y = np.asarray(y, dtype=float).reshape(-1)
        if self.location_update == "metropolis":
            start = self.sample_base(rng, 1, global_params)[0] if current is None else current
            location, _ = metropolis_location(self, y, x, rng, start, self.random_walk, global_params)
            return location
        design = self.design(x, y.size)
        if not self.eta_in_locations:
            _, eta2 = self.split(np.zeros((1, self.n_coefficients)), global_params)
            return self.sample_coefficients(y, design, float(eta2[0]), rng)

        if current is not None:
            eta2 = float(np.atleast_1d(current)[self.n_coefficients])
        else:
            eta2 = float(self._sample_eta2_prior(rng))
        theta = self.sample_coefficients(y, design, eta2, rng)
        eta2 = self.sample_eta2(y - design @ theta, rng)
        return np.concatenate([theta, [eta2]])

    # ------------------------------------------------------------ global parameters

    def initial_global_params(self, rng):
        if self.eta_in_locations:
            return {}
        return {"eta2": self.eta0_sq}

    def update_global_params(self, data, allocated_locations, rng, global_params):
        if self.eta_in_locations:
            return global_params
        theta = np.atleast_2d(allocated_locations)[:, : self.n_coefficients]
        design = self.design(data.X, data.n)
        residuals = data.y - np.einsum("ij,ij->i", design, theta)
        return {**global_params, "eta2": self.sample_eta2(residuals, rng)}
