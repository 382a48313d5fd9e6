"""
Control parameters for series and quadrature evaluation.
"""

import threading
from dataclasses import dataclass, field

from config import settings
from exceptions import DomainError


@dataclass(frozen=True)
class SeriesControl:
    """Truncation rule for power series: stop when term < rel_tol * partial sum."""
    max_terms: int = field(default_factory=lambda: settings.series_max_terms)
    rel_tol: float = field(default_factory=lambda: settings.series_rel_tol)

    def __post_init__(self):
        if self.max_terms < 1:
            raise DomainError("max_terms", self.max_terms, "must be >= 1")
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError("rel_tol", self.rel_tol, "must lie in (0, 1)")


@dataclass(frozen=True)
class QuadControl:
    """
    Tolerances for adaptive quadrature.

    A result is accepted when its error estimate is below
    ``slack * max(abs_tol, rel_tol * |value|)``; QUADPACK is conservative
    with its own estimate, hence the slack.
    """
    abs_tol: float = field(default_factory=lambda: settings.quad_abs_tol)
    rel_tol: float = field(default_factory=lambda: settings.quad_rel_tol)
    limit: int = field(default_factory=lambda: settings.quad_limit)
    slack: float = 1e3

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol <= 0:
            raise DomainError("tolerance", (self.abs_tol, self.rel_tol), "must be positive")
        if self.limit < 1:
            raise DomainError("limit", self.limit, "must be >= 1")

    def accepts(self, value: float, abserr: float) -> bool:
        return abserr <= self.slack * max(self.abs_tol, self.rel_tol * abs(value))


@dataclass
class SeriesStats:
    """Counters for evaluations that fell back from the direct series."""
    hyp2f1_flagged: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def flag_hyp2f1(self) -> None:
        with self._lock:
            self.hyp2f1_flagged += 1

    def to_dict(self) -> dict:
        with self._lock:
            return {"hyp2f1_flagged": self.hyp2f1_flagged}


SERIES_STATS = SeriesStats()
