"""
Series evaluations - modified Bessel I_nu and the Gauss hypergeometric 2F1(a,b;1;z).

Both series have nonnegative terms, so truncation at
``term < rel_tol * partial_sum`` controls the relative error directly.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy import special

from exceptions import AccuracyError, DomainError, RangeError
from .models import SERIES_STATS, SeriesControl

logger = logging.getLogger(__name__)

# I_nu(s) ~ e^s / sqrt(2 pi s) leaves double range a little above s = 713
MAX_UNSCALED_ARG = 700.0

# Beyond this argument the 2F1 series needs more terms than SeriesControl allows
HYP2F1_Z_MAX = 1.0 - 1e-6

# Rescale the running 2F1 sum before it can overflow
_RESCALE_AT = 1e250


def bessel_i(nu: float, s: float, ctrl: Optional[SeriesControl] = None) -> float:
    """
    Modified Bessel function of the first kind by direct summation.

    I_nu(s) = sum_m (s/2)^(2m+nu) / (m! Gamma(nu+m+1))

    Args:
        nu: Order, nu >= 0
        s: Argument, s >= 0
        ctrl: Series truncation control

    Returns:
        I_nu(s)

    Raises:
        DomainError: nu < 0 or s < 0
        RangeError: s too large for an unscaled value (use bessel_i_scaled)
    """
    if nu < 0:
        raise DomainError("nu", nu, "order must be nonnegative")
    if s < 0:
        raise DomainError("s", s, "argument must be nonnegative")
    if s == 0:
        return 1.0 if nu == 0 else 0.0
    if s > MAX_UNSCALED_ARG:
        raise RangeError(f"I_{nu}({s}) overflows; use bessel_i_scaled")

    ctrl = ctrl or SeriesControl()
    term = math.exp(nu * math.log(s / 2.0) - math.lgamma(nu + 1.0))
    total = term
    q = 0.25 * s * s
    for m in range(1, ctrl.max_terms):
        term *= q / (m * (m + nu))
        total += term
        if term < ctrl.rel_tol * total:
            return total
    raise AccuracyError(f"bessel_i({nu}, {s})", total, term)


def bessel_i_scaled(nu: float, s):
    """e^{-s} I_nu(s), finite for every s >= 0. Accepts arrays."""
    if nu < 0:
        raise DomainError("nu", nu, "order must be nonnegative")
    return special.ive(nu, s)


def log_bessel_i(nu: float, s):
    """log I_nu(s) via the scaled function. Accepts arrays."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(special.ive(nu, s)) + s


def log_hyp2f1_unit_c(
    a: float,
    b: float,
    z: float,
    ctrl: Optional[SeriesControl] = None,
) -> float:
    """
    log 2F1(a, b; 1; z) for a, b > 0 and 0 <= z < 1.

    The direct series is used up to ``HYP2F1_Z_MAX``. Closer to z = 1, or
    when the series does not settle within ``ctrl.max_terms``, the value is
    taken from scipy's transformed evaluation and the event is counted in
    ``SERIES_STATS.hyp2f1_flagged``.
    """
    if a <= 0 or b <= 0:
        raise DomainError("(a, b)", (a, b), "parameters must be positive")
    if not 0.0 <= z < 1.0:
        raise DomainError("z", z, "series requires 0 <= z < 1")
    if z == 0.0:
        return 0.0

    ctrl = ctrl or SeriesControl()
    if z <= HYP2F1_Z_MAX:
        log_scale = 0.0
        term = 1.0
        total = 1.0
        for m in range(ctrl.max_terms):
            term *= (a + m) * (b + m) / ((m + 1.0) ** 2) * z
            total += term
            if term < ctrl.rel_tol * total:
                return log_scale + math.log(total)
            if total > _RESCALE_AT:
                log_scale += math.log(total)
                term /= total
                total = 1.0

    SERIES_STATS.flag_hyp2f1()
    value = float(special.hyp2f1(a, b, 1.0, z))
    logger.warning(
        "2F1 series accuracy loss near z=1, using transformed evaluation",
        extra={"a": a, "b": b, "z": z},
    )
    if not math.isfinite(value) or value <= 0:
        raise AccuracyError(f"hyp2f1_unit_c({a}, {b}, {z})", value, math.inf)
    return math.log(value)


def hyp2f1_unit_c(
    a: float,
    b: float,
    z: float,
    ctrl: Optional[SeriesControl] = None,
) -> float:
    """
    2F1(a, b; 1; z) by direct series.

    Examples:
        >>> round(hyp2f1_unit_c(1, 1, 0.5), 12)
        2.0
        >>> round(hyp2f1_unit_c(0.5, 1, 0.36), 12)
        1.25
    """
    log_value = log_hyp2f1_unit_c(a, b, z, ctrl)
    if log_value > 709.0:
        raise RangeError(f"2F1({a}, {b}; 1; {z}) overflows; use log_hyp2f1_unit_c")
    return math.exp(log_value)


def log_hyp2f1_half_shift(n: int, one_minus_z: float) -> float:
    """
    log 2F1(n/2, (n+1)/2; 1; z) for a positive integer n, given w = 1 - z in (0, 1].

    Euler's transformation gives (1 - z)^{1/2 - n} 2F1(1 - n/2, (1 - n)/2; 1; z),
    and the second factor is a polynomial with positive coefficients, so the
    value stays exact as z approaches 1.

    Examples:
        >>> round(math.exp(log_hyp2f1_half_shift(3, 0.5)), 12)
        7.071067811865
    """
    if n < 1:
        raise DomainError("n", n, "must be a positive integer")
    if not 0.0 < one_minus_z <= 1.0:
        raise DomainError("1 - z", one_minus_z, "must lie in (0, 1]")
    half = 0.5 * n
    m = np.arange(math.ceil(half), dtype=float)
    log_terms = (
        special.gammaln(half) - special.gammaln(half - m)
        + special.gammaln(half + 0.5) - special.gammaln(half + 0.5 - m)
        - 2.0 * special.gammaln(m + 1.0)
        + m * math.log1p(-one_minus_z)
    ) if one_minus_z < 1.0 else np.zeros(1)
    return (0.5 - n) * math.log(one_minus_z) + float(special.logsumexp(log_terms))
