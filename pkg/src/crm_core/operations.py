"""
Operations on ε-truncated CRMs: tail masses, tilted moments, jump sampling,
prior realizations, Laplace exponents and the Bessel total-mass law.
"""

import logging
import math
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate, special

from exceptions import DomainError
from specfun import QuadControl, quad_log_integrand
from .intensity import GammaIntensity, Intensity, bessel_finite_activity_rate
from .models import EpsRealization, TruncationSpec

logger = logging.getLogger(__name__)

BaseSampler = Callable[[np.random.Generator, int], np.ndarray]

# Poisson rates of the Bessel superposition are dropped below this value
BESSEL_RATE_CUTOFF = 1e-12
# rate table length cap; beyond it the m^{-3/2} tail is sampled from its asymptote
BESSEL_TABLE_CAP = 2 ** 16
# x = log s integration range is clipped to [-_LOG_S_MAX, _LOG_S_MAX]
_LOG_S_MAX = 700.0
# e^{-t} I_nu(t) switches to its large-t expansion above this argument
_IVE_ASYMPTOTIC_T = 1e7


# ============================================================================
# Tail masses and tilted moments
# ============================================================================

def _check_u(u: float) -> None:
    if u < 0:
        raise DomainError("u", u, "tilt must be nonnegative")


def log_tilted_tail_mass(intensity: Intensity, trunc: TruncationSpec, u: float) -> float:
    """log Lambda_{eps,u} = log kappa int_eps^inf e^{-u s} rho(s) ds."""
    _check_u(u)
    return math.log(trunc.kappa) + intensity.log_tilted_integral(trunc.epsilon, u, 0)


def tilted_tail_mass(intensity: Intensity, trunc: TruncationSpec, u: float) -> float:
    """Lambda_{eps,u}; decreasing in u, equal to tail_mass at u = 0."""
    return math.exp(log_tilted_tail_mass(intensity, trunc, u))


def tail_mass(intensity: Intensity, trunc: TruncationSpec) -> float:
    """
    Lambda_eps = kappa int_eps^inf rho(s) ds, the Poisson mean of N_eps.

    Examples:
        >>> round(tail_mass(GammaIntensity(1.0), TruncationSpec(1.0, 1.0)), 7)
        0.2193839
    """
    return tilted_tail_mass(intensity, trunc, 0.0)


def log_tilted_moment(intensity: Intensity, trunc: TruncationSpec, u: float, m: int) -> float:
    """log kappa int_eps^inf s^m e^{-u s} rho(s) ds for m >= 1."""
    _check_u(u)
    if m < 1:
        raise DomainError("m", m, "moment order must be >= 1")
    return math.log(trunc.kappa) + intensity.log_tilted_integral(trunc.epsilon, u, int(m))


def tilted_moment(intensity: Intensity, trunc: TruncationSpec, u: float, m: int) -> float:
    """kappa int_eps^inf s^m e^{-u s} rho(s) ds."""
    return math.exp(log_tilted_moment(intensity, trunc, u, m))


# ============================================================================
# Jump sampling
# ============================================================================

def sample_jumps(
    intensity: Intensity,
    epsilon: float,
    u: float,
    power: int,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    iid draws from the density proportional to s^power e^{-u s} rho(s) on (eps, inf).

    power=0, u=0 gives prior jumps from rho_eps; power=n_i gives the
    allocated-jump full conditional.
    """
    if epsilon <= 0:
        raise DomainError("epsilon", epsilon, "threshold must be positive")
    _check_u(u)
    if power < 0:
        raise DomainError("power", power, "must be a nonnegative integer")
    if size < 0:
        raise DomainError("size", size, "must be nonnegative")
    return intensity.sample_tilted(epsilon, u, int(power), int(size), rng)


def sample_jump(
    intensity: Intensity, epsilon: float, u: float, power: int, rng: np.random.Generator
) -> float:
    """One draw of sample_jumps."""
    return float(sample_jumps(intensity, epsilon, u, power, 1, rng)[0])


# ============================================================================
# Prior realizations
# ============================================================================

def sample_prior_realization(
    intensity: Intensity,
    trunc: TruncationSpec,
    base: BaseSampler,
    rng: np.random.Generator,
    lam: Optional[float] = None,
) -> EpsRealization:
    """
    One draw of the ε-NormCRM.

    N_eps ~ Poisson(Lambda_eps); N_eps + 1 jumps iid from rho_eps; locations
    iid from the base sampler.

    Args:
        intensity: Lévy intensity
        trunc: eps and kappa
        base: Callable (rng, size) -> (size, dim) array of locations
        rng: Random generator
        lam: Precomputed Lambda_eps
    """
    lam = tail_mass(intensity, trunc) if lam is None else lam
    n_eps = int(rng.poisson(lam))
    jumps = sample_jumps(intensity, trunc.epsilon, 0.0, 0, n_eps + 1, rng)
    locations = base(rng, n_eps + 1)
    return EpsRealization(jumps=jumps, locations=locations, epsilon=trunc.epsilon)


def sample_prior_jump_sets(
    intensity: Intensity,
    trunc: TruncationSpec,
    reps: int,
    rng: np.random.Generator,
) -> list[np.ndarray]:
    """Jump vectors of ``reps`` independent prior realizations, drawn in one batch."""
    lam = tail_mass(intensity, trunc)
    counts = rng.poisson(lam, size=reps) + 1
    jumps = sample_jumps(intensity, trunc.epsilon, 0.0, 0, int(counts.sum()), rng)
    return np.split(jumps, np.cumsum(counts)[:-1])


# ============================================================================
# Laplace exponent
# ============================================================================

def laplace_exponent(intensity: Intensity, kappa: float, lam: float) -> float:
    """
    psi(lam) = kappa int_0^inf (1 - e^{-lam s}) rho(s) ds, closed form per family.

    Examples:
        >>> round(laplace_exponent(GammaIntensity(1.0), 2.0, 1.0), 7)
        1.3862944
    """
    if lam < 0:
        raise DomainError("lam", lam, "must be nonnegative")
    if kappa <= 0:
        raise DomainError("kappa", kappa, "must be positive")
    if lam == 0:
        return 0.0
    return kappa * intensity.laplace_exponent_unit(lam)


def laplace_exponent_quad(
    intensity: Intensity,
    kappa: float,
    lam: float,
    ctrl: Optional[QuadControl] = None,
) -> float:
    """psi(lam) by quadrature of the defining integral in x = log s."""
    if lam < 0:
        raise DomainError("lam", lam, "must be nonnegative")
    if lam == 0:
        return 0.0

    log_lam = math.log(lam)

    def log_f(x: float) -> float:
        if x > _LOG_S_MAX:
            return -math.inf
        s = math.exp(x)
        ls = log_lam + x
        # log(1 - e^{-lam s}), equal to log(lam s) to double precision below e^{-40}
        log_one_minus = ls if ls < -40.0 else math.log(-math.expm1(-math.exp(ls)))
        return log_one_minus + float(intensity.log_rho(np.array([s]))[0]) + x

    what = f"{intensity.kind} Laplace exponent"
    lower = quad_log_integrand(log_f, -_LOG_S_MAX, 0.0, ctrl, what=what)
    upper = quad_log_integrand(log_f, 0.0, math.inf, ctrl, what=what)
    return kappa * (math.exp(lower) + math.exp(upper))


# ============================================================================
# Bessel total mass
# ============================================================================

def _bessel_rate_table(omega: float, kappa: float) -> np.ndarray:
    """Poisson rates kappa Gamma(2m) / ((2 omega)^{2m} (m!)^2) for m = 1..M."""
    chunk = 4096
    rates: list[np.ndarray] = []
    start = 1
    while start <= BESSEL_TABLE_CAP:
        m = np.arange(start, min(start + chunk, BESSEL_TABLE_CAP + 1), dtype=float)
        log_rate = (
            math.log(kappa)
            + special.gammaln(2.0 * m)
            - 2.0 * m * math.log(2.0 * omega)
            - 2.0 * special.gammaln(m + 1.0)
        )
        block = np.exp(log_rate)
        below = np.flatnonzero(block < BESSEL_RATE_CUTOFF)
        if below.size:
            rates.append(block[: below[0]])
            return np.concatenate(rates)
        rates.append(block)
        start += chunk
    return np.concatenate(rates)


def bessel_total_mass_sampler(
    omega: float,
    kappa: float,
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> Union[float, np.ndarray]:
    """
    Draws of the total mass T of the (untruncated) Bessel CRM by superposition.

    T = T_G + sum_m T_m with T_G ~ gamma(kappa, rate omega) and, for each m,
    N_m ~ Poisson(kappa Gamma(2m) / ((2 omega)^{2m} (m!)^2)) jumps iid
    gamma(2m, rate omega).

    Args:
        omega: Bessel parameter, omega >= 1
        kappa: Total-mass multiplier
        rng: Random generator
        size: Number of draws; a single float is returned when None

    Returns:
        One draw or an array of draws
    """
    if omega < 1:
        raise DomainError("omega", omega, "Bessel total mass requires omega >= 1")
    if kappa <= 0:
        raise DomainError("kappa", kappa, "must be positive")
    n = 1 if size is None else int(size)

    total = rng.gamma(kappa, 1.0 / omega, size=n)

    rates = _bessel_rate_table(omega, kappa)
    table_rate = float(rates.sum())
    if table_rate > 0:
        counts = rng.poisson(table_rate, size=n)
        n_events = int(counts.sum())
        if n_events:
            m = rng.choice(rates.size, size=n_events, p=rates / table_rate) + 1
            jumps = rng.gamma(2.0 * m, 1.0 / omega)
            total += np.bincount(np.repeat(np.arange(n), counts), weights=jumps, minlength=n)

    if rates.size == BESSEL_TABLE_CAP:
        # remaining terms decay like m^{-3/2} omega^{-2m}; sample m from the power-law tail
        tail_rate = kappa * bessel_finite_activity_rate(omega) - table_rate
        if tail_rate > 0:
            counts = rng.poisson(tail_rate, size=n)
            n_events = int(counts.sum())
            if n_events:
                v = 1.0 - rng.random(n_events)
                m = np.floor((BESSEL_TABLE_CAP + 0.5) / v ** 2 + 0.5)
                jumps = rng.gamma(2.0 * m, 1.0 / omega)
                total += np.bincount(np.repeat(np.arange(n), counts), weights=jumps, minlength=n)

    return float(total[0]) if size is None else total


def _log_ive(nu: float, t: np.ndarray) -> np.ndarray:
    """log(e^{-t} I_nu(t)); the large-t expansion takes over where AMOS gives up."""
    out = np.empty_like(t)
    large = t > _IVE_ASYMPTOTIC_T
    with np.errstate(divide="ignore"):
        out[~large] = np.log(special.ive(nu, t[~large]))
    tl = t[large]
    mu = 4.0 * nu * nu
    corr = -(mu - 1.0) / (8.0 * tl) + (mu - 1.0) * (mu - 9.0) / (2.0 * (8.0 * tl) ** 2)
    out[large] = -0.5 * np.log(2.0 * math.pi * tl) + np.log1p(corr)
    return out


def bessel_total_mass_logpdf(t, omega: float, kappa: float) -> np.ndarray:
    """log f_T(t) = log kappa + kappa log(omega + sqrt(omega^2-1)) - omega t + log I_kappa(t) - log t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    with np.errstate(divide="ignore"):
        return (
            math.log(kappa)
            + kappa * math.log(omega + math.sqrt(omega * omega - 1.0))
            - (omega - 1.0) * t
            + _log_ive(kappa, t)
            - np.log(t)
        )


def bessel_total_mass_cdf(t, omega: float, kappa: float, grid_points: int = 30001) -> np.ndarray:
    """
    CDF of the Bessel total mass, by cumulative trapezoid on a log grid.

    Below the first grid point the small-t expansion I_kappa(t) ~ (t/2)^kappa / Gamma(kappa+1)
    is integrated exactly.
    """
    t = np.asarray(t, dtype=float)
    x = np.linspace(math.log(1e-12), math.log(1e16), grid_points)
    grid = np.exp(x)
    dens = np.exp(bessel_total_mass_logpdf(grid, omega, kappa) + x)
    dens = np.where(np.isfinite(dens), dens, 0.0)
    start = math.exp(
        kappa * math.log(omega + math.sqrt(omega * omega - 1.0))
        + kappa * math.log(grid[0] / 2.0)
        - math.lgamma(kappa + 1.0)
    )
    cdf = start + integrate.cumulative_trapezoid(dens, x, initial=0.0)
    with np.errstate(divide="ignore"):
        log_t = np.log(np.maximum(t, 1e-300))
    return np.clip(np.interp(log_t, x, cdf, left=0.0, right=1.0), 0.0, 1.0)
