"""
Eppf evaluation - exact eppf of the ε-NormCRM and its untruncated limits.

This module:
1. Assembles the u-integrand of the ε-eppf on log scale from tail masses and
   tilted moments
2. Integrates it in x = log u around its peak
3. Provides the Dirichlet closed form and the normalized Bessel eppf
4. Derives p_eps(2) and the prior mean/variance/covariance of P_eps(B)
"""

import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import special

from crm_core import Intensity, TruncationSpec, log_tilted_moment, tail_mass, tilted_tail_mass
from exceptions import DomainError
from specfun import (
    QuadControl,
    integrate_log_peak,
    log_hyp2f1_half_shift,
    log_hyp2f1_unit_c,
)
from .models import Composition

logger = logging.getLogger(__name__)

CompositionLike = Union[Composition, Sequence[int]]

# largest x = log u the integrands are evaluated at
_LOG_U_MAX = 700.0
# 2F1 argument above which the terminating Euler form is used
_EULER_FORM_Z = 0.9


def as_composition(comp: CompositionLike) -> Composition:
    return comp if isinstance(comp, Composition) else Composition(tuple(comp))


# ============================================================================
# ε-NormCRM eppf
# ============================================================================

def expected_total_mass(intensity: Intensity, trunc: TruncationSpec) -> float:
    """E(T_eps) = (Lambda_eps + 1) * kappa int_eps^inf s rho(s) ds / Lambda_eps; inf if the moment diverges."""
    lam = tail_mass(intensity, trunc)
    try:
        first = math.exp(log_tilted_moment(intensity, trunc, 0.0, 1))
    except DomainError:
        return math.inf
    return (lam + 1.0) * first / lam


def log_eppf_eps_integrand(
    intensity: Intensity,
    trunc: TruncationSpec,
    comp: CompositionLike,
    lam: Optional[float] = None,
) -> Callable[[float], float]:
    """
    log of the ε-eppf integrand in x = log u, Jacobian included.

    f(u) = u^{n-1}/Gamma(n) (k + Lambda_{eps,u})/Lambda_eps e^{Lambda_{eps,u} - Lambda_eps}
           prod_i kappa int_eps^inf s^{n_i} e^{-u s} rho(s) ds
    """
    comp = as_composition(comp)
    lam = tail_mass(intensity, trunc) if lam is None else lam
    log_lam = math.log(lam)
    sizes, mult = np.unique(np.asarray(comp.counts), return_counts=True)
    log_gamma_n = math.lgamma(comp.n)

    def log_f(x: float) -> float:
        if x > _LOG_U_MAX:
            return -math.inf
        u = math.exp(x)
        if u == 0.0:
            return -math.inf
        lam_u = tilted_tail_mass(intensity, trunc, u)
        total = comp.n * x - log_gamma_n + math.log(comp.k + lam_u) - log_lam + (lam_u - lam)
        for size, m in zip(sizes, mult):
            total += m * log_tilted_moment(intensity, trunc, u, int(size))
        return total

    return log_f


def log_eppf_eps(
    intensity: Intensity,
    trunc: TruncationSpec,
    comp: CompositionLike,
    ctrl: Optional[QuadControl] = None,
) -> float:
    """log p_eps(n_1, ..., n_k)."""
    comp = as_composition(comp)
    if comp.n == 1:
        return 0.0
    mean_mass = expected_total_mass(intensity, trunc)
    u_star = comp.n / mean_mass if math.isfinite(mean_mass) else float(comp.n)
    value = integrate_log_peak(
        log_eppf_eps_integrand(intensity, trunc, comp),
        math.log(u_star),
        ctrl,
        what=f"eppf_eps{comp} for {intensity!r}, kappa={trunc.kappa}, eps={trunc.epsilon}",
    )
    return min(value, 0.0)


def eppf_eps(
    intensity: Intensity,
    trunc: TruncationSpec,
    comp: CompositionLike,
    ctrl: Optional[QuadControl] = None,
) -> float:
    """
    Probability of a partition with block sizes comp under the ε-NormCRM.

    Args:
        intensity: Lévy intensity
        trunc: eps and kappa
        comp: Block sizes (n_1, ..., n_k)
        ctrl: Quadrature tolerances

    Returns:
        Probability in (0, 1]

    Raises:
        AccuracyError: quadrature tolerance not met
    """
    return math.exp(log_eppf_eps(intensity, trunc, comp, ctrl))


# ============================================================================
# Limits
# ============================================================================

def log_eppf_dirichlet(comp: CompositionLike, kappa: float) -> float:
    comp = as_composition(comp)
    if kappa <= 0:
        raise DomainError("kappa", kappa, "must be positive")
    return (
        math.lgamma(kappa)
        - math.lgamma(kappa + comp.n)
        + comp.k * math.log(kappa)
        + sum(math.lgamma(c) for c in comp.counts)
    )


def eppf_dirichlet(comp: CompositionLike, kappa: float) -> float:
    """
    Gamma(kappa)/Gamma(kappa+n) kappa^k prod Gamma(n_j).

    Examples:
        >>> round(eppf_dirichlet((3, 1), 2.0), 7)
        0.0666667
    """
    return math.exp(log_eppf_dirichlet(comp, kappa))


def _log_hyp2f1_block(n_j: int, u: float, omega: float) -> float:
    """log 2F1(n_j/2, (n_j+1)/2; 1; 1/w^2) with w = u + omega."""
    w = u + omega
    z = 1.0 / (w * w)
    if z <= _EULER_FORM_Z:
        return log_hyp2f1_unit_c(0.5 * n_j, 0.5 * (n_j + 1), z)
    # 1 - 1/w^2 = (w - 1)(w + 1)/w^2, with w - 1 formed without cancellation
    one_minus_z = (u + (omega - 1.0)) * (w + 1.0) * z
    return log_hyp2f1_half_shift(n_j, one_minus_z)


def log_eppf_bessel_integrand(comp: CompositionLike, omega: float, kappa: float) -> Callable[[float], float]:
    """log of the normalized Bessel eppf integrand in x = log u, Jacobian included."""
    comp = as_composition(comp)
    sizes, mult = np.unique(np.asarray(comp.counts), return_counts=True)
    const = (
        comp.k * math.log(kappa)
        - math.lgamma(comp.n)
        + kappa * math.acosh(omega)
        + float(np.dot(mult, special.gammaln(sizes)))
    )

    def log_f(x: float) -> float:
        if x > _LOG_U_MAX:
            return -math.inf
        u = math.exp(x)
        if u == 0.0:
            return -math.inf
        w = u + omega
        total = const + comp.n * x - kappa * math.acosh(w) - comp.n * math.log(w)
        for size, m in zip(sizes, mult):
            total += m * _log_hyp2f1_block(int(size), u, omega)
        return total

    return log_f


def log_eppf_bessel(
    comp: CompositionLike, omega: float, kappa: float, ctrl: Optional[QuadControl] = None
) -> float:
    comp = as_composition(comp)
    if omega < 1:
        raise DomainError("omega", omega, "normalized Bessel measure requires omega >= 1")
    if kappa <= 0:
        raise DomainError("kappa", kappa, "must be positive")
    if comp.n == 1:
        return 0.0
    # the Dirichlet-limit integrand peaks near u = n omega / kappa
    x_guess = math.log(comp.n * omega / kappa)
    value = integrate_log_peak(
        log_eppf_bessel_integrand(comp, omega, kappa),
        x_guess,
        ctrl,
        what=f"eppf_bessel{comp} (omega={omega}, kappa={kappa})",
    )
    return min(value, 0.0)


def eppf_bessel(
    comp: CompositionLike, omega: float, kappa: float, ctrl: Optional[QuadControl] = None
) -> float:
    """
    Eppf of the (untruncated) normalized Bessel random measure.

    kappa^k int u^{n-1}/Gamma(n) ((omega + sqrt(omega^2-1)) / (w + sqrt(w^2-1)))^kappa w^{-n}
    prod_j Gamma(n_j) 2F1(n_j/2, (n_j+1)/2; 1; w^{-2}) du, w = u + omega.
    """
    return math.exp(log_eppf_bessel(comp, omega, kappa, ctrl))


def bessel_eppf_bounds(comp: CompositionLike, omega: float, kappa: float) -> tuple[float, float]:
    """
    Lower and upper bounds of eppf_bessel in terms of the Dirichlet eppf.

    ((1 + sqrt(1 - omega^-2))/2)^kappa p_D <= p_B <= prod_j 2F1(n_j/2, (n_j+1)/2; 1; omega^-2) p_D
    """
    comp = as_composition(comp)
    log_pd = log_eppf_dirichlet(comp, kappa)
    lower = kappa * math.log(0.5 + 0.5 * math.sqrt(1.0 - 1.0 / omega ** 2)) + log_pd
    if omega == 1.0:
        return math.exp(lower), math.inf
    upper = log_pd + sum(_log_hyp2f1_block(c, 0.0, omega) for c in comp.counts)
    return math.exp(lower), math.exp(upper)


# ============================================================================
# Pair tie probability and prior moments
# ============================================================================

def pair_tie_prob(intensity: Intensity, trunc: TruncationSpec, ctrl: Optional[QuadControl] = None) -> float:
    """p_eps(2): probability that two draws from P_eps coincide."""
    return eppf_eps(intensity, trunc, (2,), ctrl)


def moments_from_tie_prob(
    tie_prob: float,
    p0_masses: tuple[float, float, float],
) -> tuple[float, float, float]:
    """
    Mean and variance of P_eps(B1) and Cov(P_eps(B1), P_eps(B2)).

    Args:
        tie_prob: p_eps(2)
        p0_masses: (P0(B1), P0(B2), P0(B1 & B2))

    Returns:
        (P0(B1), p2 P0(B1)(1 - P0(B1)), p2 (P0(B1 & B2) - P0(B1) P0(B2)))

    Examples:
        >>> moments_from_tie_prob(0.5, (0.5, 0.5, 0.5))[1]
        0.125
    """
    b1, b2, both = p0_masses
    for name, value in (("P0(B1)", b1), ("P0(B2)", b2), ("P0(B1 & B2)", both)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(name, value, "mass must lie in [0, 1]")
    if both > min(b1, b2) or b1 + b2 - both > 1.0 + 1e-12:
        raise DomainError("p0_masses", p0_masses, "masses are not consistent")
    if not 0.0 <= tie_prob <= 1.0:
        raise DomainError("tie_prob", tie_prob, "must lie in [0, 1]")
    return b1, tie_prob * b1 * (1.0 - b1), tie_prob * (both - b1 * b2)


def prior_mean_var_cov(
    intensity: Intensity,
    trunc: TruncationSpec,
    p0_masses: tuple[float, float, float],
) -> tuple[float, float, float]:
    """
    Mean and variance of P_eps(B1) and Cov(P_eps(B1), P_eps(B2)) for the given intensity.

    E P_eps(B) = P0(B) and both second moments scale with p_eps(2).
    """
    return moments_from_tie_prob(pair_tie_prob(intensity, trunc), p0_masses)
