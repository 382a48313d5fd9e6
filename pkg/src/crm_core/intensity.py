"""
Intensity families - Lévy intensities rho(s) of homogeneous CRMs.

Each family implements:
1. log rho(s) on arrays
2. log of int_eps^inf s^m e^{-u s} rho(s) ds (closed form or quadrature)
3. the Laplace exponent per unit kappa
4. exact draws from s^power e^{-u s} rho(s) 1(s > eps)

The total-mass multiplier kappa is not part of the intensity; it lives in
TruncationSpec together with eps.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Optional, Type

import numpy as np
from scipy import special

from exceptions import DomainError
from specfun import (
    QuadControl,
    log_upper_gamma,
    log_upper_gamma_vec,
    quad_log_integrand,
)
from .sampling import KernelPiece, sample_kernel_mixture, sample_power_exp

logger = logging.getLogger(__name__)

# exp() argument cap when integrating in x = log s; s = e^x stays a normal
# double on [-_LOG_S_MAX, _LOG_S_MAX]
_LOG_S_MAX = 700.0


class Intensity(ABC):
    """
    Abstract Lévy intensity rho(s) on (0, inf).

    Subclasses must set ``kind`` and implement the abstract members. The
    regularity conditions (finite int min(1, s) rho, infinite activity) are
    checked numerically at construction.
    """

    kind: str = ""

    def __init__(self):
        self._check_regularity()

    # ------------------------------------------------------------------ api

    @property
    @abstractmethod
    def params(self) -> dict:
        """Family parameters, as written in configs."""
        pass

    @abstractmethod
    def log_rho(self, s: np.ndarray) -> np.ndarray:
        """log rho(s), vectorized."""
        pass

    @abstractmethod
    def log_tilted_integral(self, epsilon: float, u: float, m: int) -> float:
        """log int_eps^inf s^m e^{-u s} rho(s) ds."""
        pass

    @abstractmethod
    def laplace_exponent_unit(self, lam: float) -> float:
        """int_0^inf (1 - e^{-lam s}) rho(s) ds."""
        pass

    @abstractmethod
    def sample_tilted(
        self, epsilon: float, u: float, power: int, size: int, rng: np.random.Generator
    ) -> np.ndarray:
        """iid draws from s^power e^{-u s} rho(s) 1(s > eps)."""
        pass

    # -------------------------------------------------------------- helpers

    def log_tilted_integral_quad(
        self, epsilon: float, u: float, m: int, ctrl: Optional[QuadControl] = None
    ) -> float:
        """Quadrature version of log_tilted_integral, in x = log s."""
        def log_f(x: float) -> float:
            if x > _LOG_S_MAX:
                return -math.inf
            s = math.exp(x)
            return (m + 1) * x - u * s + float(self.log_rho(np.array([s]))[0])

        return quad_log_integrand(
            log_f,
            math.log(epsilon),
            math.inf,
            ctrl,
            what=f"{self.kind} tilted integral (eps={epsilon}, u={u}, m={m})",
        )

    def _check_regularity(self) -> None:
        def log_small(x: float) -> float:
            s = math.exp(x)
            return 2.0 * x + float(self.log_rho(np.array([s]))[0])

        small = quad_log_integrand(
            log_small, -_LOG_S_MAX, 0.0, what=f"{self.kind} small-jump integral"
        )
        large = self.log_tilted_integral(1.0, 0.0, 0)
        # s^2 rho(s) must still be growing in log s at the cut
        vanishing = log_small(-_LOG_S_MAX) < log_small(1.0 - _LOG_S_MAX)
        if not (vanishing and math.isfinite(small) and math.isfinite(large)):
            raise DomainError(self.kind, self.params, "int min(1, s) rho(s) ds is not finite")
        activity = math.exp(self.log_tilted_integral(1e-12, 0.0, 0)) - math.exp(
            self.log_tilted_integral(1e-6, 0.0, 0)
        )
        if not activity > 1.0:
            raise DomainError(self.kind, self.params, "intensity does not have infinite activity")

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{type(self).__name__}({inner})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.params == other.params

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple(sorted(self.params.items()))))


# ============================================================================
# Gamma
# ============================================================================

class GammaIntensity(Intensity):
    """rho(s) = s^{-1} e^{-omega s}; normalizes to the Dirichlet process."""

    kind = "gamma"

    def __init__(self, omega: float = 1.0):
        if not omega > 0:
            raise DomainError("omega", omega, "must be positive")
        self.omega = float(omega)
        super().__init__()

    @property
    def params(self) -> dict:
        return {"omega": self.omega}

    def log_rho(self, s):
        s = np.asarray(s, dtype=float)
        return -np.log(s) - self.omega * s

    def log_tilted_integral(self, epsilon, u, m):
        r = u + self.omega
        # int_eps^inf s^{m-1} e^{-r s} ds = Gamma(m, r eps) / r^m
        return log_upper_gamma(float(m), r * epsilon) - m * math.log(r)

    def laplace_exponent_unit(self, lam):
        return math.log1p(lam / self.omega)

    def sample_tilted(self, epsilon, u, power, size, rng):
        return sample_power_exp(float(power), u + self.omega, epsilon, size, rng)


# ============================================================================
# Generalized gamma
# ============================================================================

class GenGammaIntensity(Intensity):
    """
    rho(s) = s^{-1-sigma} e^{-omega s} / Gamma(1 - sigma), 0 <= sigma < 1.

    sigma = 0 is the gamma intensity.
    """

    kind = "gengamma"

    def __init__(self, sigma: float, omega: float = 1.0):
        if not 0.0 <= sigma < 1.0:
            raise DomainError("sigma", sigma, "must lie in [0, 1)")
        if not omega > 0:
            raise DomainError("omega", omega, "must be positive")
        self.sigma = float(sigma)
        self.omega = float(omega)
        self._log_norm = -math.lgamma(1.0 - self.sigma)
        super().__init__()

    @property
    def params(self) -> dict:
        return {"sigma": self.sigma, "omega": self.omega}

    def log_rho(self, s):
        s = np.asarray(s, dtype=float)
        return self._log_norm - (1.0 + self.sigma) * np.log(s) - self.omega * s

    def log_tilted_integral(self, epsilon, u, m):
        r = u + self.omega
        a = m - self.sigma
        return self._log_norm + log_upper_gamma(a, r * epsilon) - a * math.log(r)

    def laplace_exponent_unit(self, lam):
        log_ratio = math.log1p(lam / self.omega)
        if self.sigma == 0.0:
            return log_ratio
        # ((omega+lam)^sigma - omega^sigma) / sigma
        return self.omega ** self.sigma * math.expm1(self.sigma * log_ratio) / self.sigma

    def sample_tilted(self, epsilon, u, power, size, rng):
        return sample_power_exp(power - self.sigma, u + self.omega, epsilon, size, rng)


# ============================================================================
# Bessel
# ============================================================================

def bessel_finite_activity_rate(omega: float) -> float:
    """-log(1/2 + sqrt(1 - omega^{-2}) / 2); log 2 at omega = 1."""
    return -math.log(0.5 + 0.5 * math.sqrt(1.0 - 1.0 / omega ** 2))


class BesselIntensity(Intensity):
    """
    rho(s) = s^{-1} e^{-omega s} I_0(s), omega >= 1.

    Expanding I_0 gives rho = sum_m s^{2m-1} e^{-omega s} / (4^m (m!)^2): a
    gamma intensity plus finite-activity gamma(2m, omega) components.
    Tilted integrals use that expansion when omega + u is large enough for
    the terms to fall off quickly and quadrature otherwise.
    """

    kind = "bessel"

    # series in (omega + u)^{-2} is used at or above this rate
    SERIES_MIN_RATE = 1.25
    _SERIES_CHUNK = 64
    _SERIES_MAX_TERMS = 20_000
    # e^{-s} I_0(s) sqrt(s) <= 0.47 for all s > 0
    _SQRT_BOUND = 0.5
    _SPLIT = 0.25

    def __init__(self, omega: float = 1.05):
        if not omega >= 1.0:
            raise DomainError("omega", omega, "Bessel intensity requires omega >= 1")
        self.omega = float(omega)
        super().__init__()

    @property
    def params(self) -> dict:
        return {"omega": self.omega}

    def log_rho(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log(s) - (self.omega - 1.0) * s + np.log(special.ive(0, s))

    def log_series_terms(self, epsilon: float, u: float, m: int) -> np.ndarray:
        """log of c_j Gamma(2j+m, r eps) / r^{2j+m}, c_j = 1/(4^j (j!)^2), j = 0, 1, ..."""
        r = u + self.omega
        log_r = math.log(r)
        terms: list[np.ndarray] = []
        start = 0
        while start < self._SERIES_MAX_TERMS:
            j = np.arange(start, start + self._SERIES_CHUNK, dtype=float)
            order = 2.0 * j + m
            log_c = -2.0 * j * math.log(2.0) - 2.0 * special.gammaln(j + 1.0)
            log_g = np.empty_like(order)
            pos = order > 0
            log_g[pos] = log_upper_gamma_vec(order[pos], r * epsilon)
            if not pos.all():
                log_g[~pos] = log_upper_gamma(0.0, r * epsilon)
            chunk = log_c + log_g - order * log_r
            terms.append(chunk)
            start += self._SERIES_CHUNK
            everything = np.concatenate(terms)
            if chunk[-1] < everything.max() - 40.0 and chunk[-1] < chunk[-2]:
                return everything
        raise DomainError("omega + u", r, "series did not settle; use quadrature")

    def log_tilted_integral(self, epsilon, u, m):
        if m >= 1 and u == 0.0 and self.omega == 1.0:
            raise DomainError("(u, m)", (u, m), "moment diverges for omega = 1 at u = 0")
        if u + self.omega >= self.SERIES_MIN_RATE:
            return float(special.logsumexp(self.log_series_terms(epsilon, u, m)))
        return self.log_tilted_integral_quad(epsilon, u, m)

    def laplace_exponent_unit(self, lam):
        w = self.omega + lam
        return math.log((w + math.sqrt(w * w - 1.0)) / (self.omega + math.sqrt(self.omega ** 2 - 1.0)))

    def finite_activity_rate(self) -> float:
        """int_0^inf s^{-1} e^{-omega s} (I_0(s) - 1) ds per unit kappa."""
        return bessel_finite_activity_rate(self.omega)

    def sample_tilted(self, epsilon, u, power, size, rng):
        # target s^{power-1} e^{-r s} ive(0, s) with r = u + omega - 1
        r = u + self.omega - 1.0
        if r == 0.0 and power >= 1:
            raise DomainError("(u, power)", (u, power), "tilted density is not normalizable")
        split = max(epsilon, self._SPLIT)

        def log_ive(s):
            return np.log(special.ive(0, s))

        pieces = [
            KernelPiece(a=float(power), lo=epsilon, hi=split, log_h=log_ive),
            KernelPiece(
                a=power - 0.5,
                lo=split,
                hi=math.inf,
                log_h=lambda s: log_ive(s) + 0.5 * np.log(s) - math.log(self._SQRT_BOUND),
                log_scale=math.log(self._SQRT_BOUND),
            ),
        ]
        return sample_kernel_mixture(pieces, r, size, rng, fallback=(float(power), log_ive))


# ============================================================================
# Registry
# ============================================================================

INTENSITY_FAMILIES: dict[str, Type[Intensity]] = {
    GammaIntensity.kind: GammaIntensity,
    GenGammaIntensity.kind: GenGammaIntensity,
    BesselIntensity.kind: BesselIntensity,
}


def build_intensity(kind: str, omega: float = 1.0, sigma: float = 0.0) -> Intensity:
    """Construct an intensity by family name."""
    if kind == "gamma":
        return GammaIntensity(omega=omega)
    if kind == "gengamma":
        return GenGammaIntensity(sigma=sigma, omega=omega)
    if kind == "bessel":
        return BesselIntensity(omega=omega)
    raise DomainError("kind", kind, f"unknown intensity; choose from {sorted(INTENSITY_FAMILIES)}")
