"""
Data models for mixture: datasets and model configurations.
"""

from dataclasses import dataclass, field
from typing import Annotated, Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator

from exceptions import DomainError


# ============================================================================
# Dataset
# ============================================================================

@dataclass
class Dataset:
    """
    Observations y_1..y_n with optional covariates.

    ``X`` holds raw covariate columns without an intercept; models add the
    intercept themselves.
    """
    y: np.ndarray
    X: Optional[np.ndarray] = None
    response: str = "y"
    covariates: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float).reshape(-1)
        if self.y.size == 0:
            raise DomainError("y", 0, "dataset is empty")
        if not np.all(np.isfinite(self.y)):
            raise DomainError("y", "non-finite", "responses must be finite")
        if self.X is not None:
            self.X = np.asarray(self.X, dtype=float)
            if self.X.ndim == 1:
                self.X = self.X.reshape(-1, 1)
            if self.X.shape[0] != self.y.size:
                raise DomainError("X", self.X.shape, f"expected {self.y.size} rows")
            if not np.all(np.isfinite(self.X)):
                raise DomainError("X", "non-finite", "covariates must be finite")
            if not self.covariates:
                self.covariates = tuple(f"x{j + 1}" for j in range(self.X.shape[1]))
            elif len(self.covariates) != self.X.shape[1]:
                raise DomainError("covariates", self.covariates, f"expected {self.X.shape[1]} names")
        self.covariates = tuple(self.covariates)

    @property
    def n(self) -> int:
        return int(self.y.size)

    @property
    def p(self) -> int:
        return 0 if self.X is None else int(self.X.shape[1])

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({self.response: self.y})
        for j, name in enumerate(self.covariates):
            frame[name] = self.X[:, j]
        return frame


# ============================================================================
# Model configurations
# ============================================================================

class GaussNIGConfig(BaseModel):
    """Gaussian kernel with a normal-inverse-gamma base measure on (mu, sigma^2)."""
    kind: Literal["gauss_nig"] = "gauss_nig"
    kappa0: float = Field(0.01, gt=0)       # prior precision scale of mu
    a: float = Field(2.0, gt=0)             # inverse-gamma shape
    b: float = Field(1.0, gt=0)             # inverse-gamma scale
    m0: Optional[float] = None              # prior mean of mu; data mean when omitted

    def build(self):
        from .gauss_nig import GaussNIGModel
        return GaussNIGModel(kappa0=self.kappa0, a=self.a, b=self.b, m0=self.m0)


VarianceMode = Literal["in_locations", "parametric"]
LocationUpdate = Literal["conjugate", "metropolis"]


class LinDepConfig(BaseModel):
    """Linear dependent model: mean x'theta with intercept, variance eta^2."""
    kind: Literal["lindep"] = "lindep"
    b0: list[float] = Field(default_factory=lambda: [-50.0, 5.0, 0.0, 0.0])
    sigma0: list[list[float]] = Field(
        default_factory=lambda: [
            [100.0, 0.0, 0.0, 0.0],
            [0.0, 10.0, 0.0, 0.0],
            [0.0, 0.0, 10.0, 0.0],
            [0.0, 0.0, 0.0, 10.0],
        ]
    )
    nu0: float = Field(4.0, gt=0)
    eta0_sq: float = Field(1.0, gt=0)
    variance_mode: VarianceMode = "in_locations"
    standardize: bool = False
    location_update: LocationUpdate = "conjugate"
    rw_scale: float = Field(0.1, gt=0)        # random-walk step, unconstrained coordinates
    rw_steps: int = Field(5, ge=1)

    @field_validator("sigma0", mode="before")
    @classmethod
    def _diag_shorthand(cls, value):
        # a flat list is read as the diagonal
        if isinstance(value, (list, tuple)) and value and not isinstance(value[0], (list, tuple)):
            return np.diag(np.asarray(value, dtype=float)).tolist()
        return value

    @model_validator(mode="after")
    def _check_prior(self) -> "LinDepConfig":
        sigma0 = np.asarray(self.sigma0, dtype=float)
        q = len(self.b0)
        if sigma0.shape != (q, q):
            raise ValueError(f"sigma0 must be {q}x{q} to match b0")
        if not np.allclose(sigma0, sigma0.T):
            raise ValueError("sigma0 must be symmetric")
        if np.any(np.linalg.eigvalsh(sigma0) <= 0):
            raise ValueError("sigma0 must be positive definite")
        return self

    @property
    def n_covariates(self) -> int:
        return len(self.b0) - 1

    def build(self):
        from .lindep import LinDepModel
        return LinDepModel(
            b0=np.asarray(self.b0, dtype=float),
            sigma0=np.asarray(self.sigma0, dtype=float),
            nu0=self.nu0,
            eta0_sq=self.eta0_sq,
            variance_mode=self.variance_mode,
            standardize=self.standardize,
            location_update=self.location_update,
            rw_scale=self.rw_scale,
            rw_steps=self.rw_steps,
        )


ModelConfig = Annotated[Union[GaussNIGConfig, LinDepConfig], Field(discriminator="kind")]
