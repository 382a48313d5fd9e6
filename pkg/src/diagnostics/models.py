"""
Data models for diagnostics: fit report and posterior cluster summaries.
"""

from typing import Optional

from pydantic import BaseModel, Field, field_validator


class KnPosterior(BaseModel):
    """Empirical posterior law of the number of clusters."""
    support: list[int]
    probs: list[float]
    sweeps: int

    @field_validator("probs")
    @classmethod
    def _sums_to_one(cls, v: list[float]) -> list[float]:
        if v and abs(sum(v) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(v)}")
        return v

    def prob(self, k: int) -> float:
        return dict(zip(self.support, self.probs)).get(k, 0.0)

    @property
    def mode(self) -> int:
        return self.support[max(range(len(self.probs)), key=self.probs.__getitem__)]

    @property
    def mean(self) -> float:
        return sum(k * p for k, p in zip(self.support, self.probs))


class FitReport(BaseModel):
    """
    Predictive goodness-of-fit indexes of one chain.

    WAIC values are on the deviance scale (-2 x elpd); ``elpd_waic*`` are
    the same quantities on the LPML scale.
    """
    n: int
    sweeps: int
    sse: float
    ssae: float
    lpml: float
    waic1: float
    waic2: float
    elpd_waic1: float
    elpd_waic2: float
    p_waic1: float
    p_waic2: float
    cpo: list[float] = Field(default_factory=list)
    kn_posterior: Optional[KnPosterior] = None
    binder_partition: Optional[list[int]] = None
    binder_loss: Optional[float] = None

    @field_validator("cpo")
    @classmethod
    def _positive_cpo(cls, v: list[float]) -> list[float]:
        if any(not c > 0 for c in v):
            raise ValueError("CPO values must be positive")
        return v

    def summary(self) -> dict:
        """Scalar fields only."""
        return self.model_dump(exclude={"cpo", "kn_posterior", "binder_partition"})
