"""
Run configuration models.

A run file (YAML or JSON) validates into RunConfig. Presets fill in the
Bessel (omega, kappa) pair; an explicit kappa or intensity in the file wins.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from config import settings
from crm_core import IntensityConfig
from eppf import CalibrationTarget, get_preset
from gibbs import ChainConfig, EpsilonPrior
from mixture import GaussNIGConfig, ModelConfig

# (rcc, Ht, Wt) of three reference athletes
AIS_REFERENCE_VECTORS: list[list[float]] = [
    [3.9, 176.0, 60.0],
    [5.34, 178.6, 67.1],
    [5.17, 209.4, 113.7],
]

SimulatedData = Literal["five_gaussian", "two_regime", "ais_like"]


class DataSpec(BaseModel):
    """Where the observations come from: a CSV file or a built-in generator."""
    path: Optional[str] = None
    response: str = "y"
    covariates: list[str] = Field(default_factory=list)
    simulate: Optional[SimulatedData] = None
    n: Optional[int] = Field(None, ge=1)       # sample size of simulated data
    seed: Optional[int] = None                 # generator seed; the run seed when omitted

    @model_validator(mode="after")
    def _one_source(self) -> "DataSpec":
        if (self.path is None) == (self.simulate is None):
            raise ValueError("set exactly one of data.path or data.simulate")
        return self


class ScheduleSpec(BaseModel):
    """Chain lengths."""
    n_burnin: int = Field(5000, ge=0)
    n_samples: int = Field(5000, ge=1)
    thinning: int = Field(10, ge=1)
    n_chains: int = Field(1, ge=1)
    progress_every: int = Field(1000, ge=1)


class GridSpec(BaseModel):
    """Response grid for predictive densities; bounds default to the data range padded by 10%."""
    lower: Optional[float] = None
    upper: Optional[float] = None
    points: int = Field(200, ge=2)
    covariate_vectors: list[list[float]] = Field(default_factory=list)
    quantiles: tuple[float, float] = (0.05, 0.95)

    @model_validator(mode="after")
    def _ordered(self) -> "GridSpec":
        if self.lower is not None and self.upper is not None and not self.lower < self.upper:
            raise ValueError("grid.lower must be below grid.upper")
        lo, hi = self.quantiles
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError("grid.quantiles must satisfy 0 <= lower < upper <= 1")
        return self


class RunConfig(BaseModel):
    """Fully resolved settings of one `run` (also the config echo written to disk)."""
    name: str = "run"
    seed: int = Field(default_factory=lambda: settings.default_seed)
    output_dir: Optional[str] = None
    preset: Optional[str] = None
    intensity: Optional[IntensityConfig] = None
    kappa: Optional[float] = Field(None, gt=0)
    calibration: Optional[CalibrationTarget] = None
    epsilon: float = Field(default_factory=lambda: settings.default_epsilon, gt=0)
    epsilon_prior: Optional[EpsilonPrior] = None
    model: ModelConfig = Field(default_factory=GaussNIGConfig)
    data: DataSpec
    chain: ScheduleSpec = Field(default_factory=ScheduleSpec)
    grid: GridSpec = Field(default_factory=GridSpec)
    binder_loss_ratio: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _apply_preset(self) -> "RunConfig":
        if self.preset is not None:
            try:
                preset = get_preset(self.preset)
            except KeyError as e:
                raise ValueError(str(e.args[0]))
            if self.intensity is None:
                self.intensity = IntensityConfig(kind="bessel", omega=preset.omega)
            if self.kappa is None and self.calibration is None:
                self.kappa = preset.kappa
        if self.intensity is None:
            self.intensity = IntensityConfig()
        return self

    def chain_config(self, kappa: Optional[float] = None) -> ChainConfig:
        kappa = self.kappa if kappa is None else kappa
        if kappa is None:
            raise ValueError("kappa is unresolved; calibrate first")
        return ChainConfig(
            n_burnin=self.chain.n_burnin,
            n_samples=self.chain.n_samples,
            thinning=self.chain.thinning,
            n_chains=self.chain.n_chains,
            progress_every=self.chain.progress_every,
            seed=self.seed,
            epsilon=self.epsilon,
            kappa=kappa,
            intensity=self.intensity,
            epsilon_prior=self.epsilon_prior,
        )
