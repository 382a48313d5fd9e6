"""
Upper incomplete gamma function, including the negative orders needed by the
generalized gamma tail mass.
"""

import math
from typing import Optional

import numpy as np
from scipy import special

from exceptions import DomainError
from .models import QuadControl
from .quadrature import integrate_1d

# The a -> a+1 recurrence cancels badly for |a| small or x large
_RECURRENCE_MAX_X = 2.0
_RECURRENCE_MIN_ABS_A = 1e-3
# Gamma(a, x) asymptotic expansion is used for x above this multiple of |a| + 1
_ASYMPTOTIC_MIN_RATIO = 30.0


def _relative_ctrl(ctrl: Optional[QuadControl]) -> QuadControl:
    base = ctrl or QuadControl()
    return QuadControl(abs_tol=0.0, rel_tol=base.rel_tol, limit=base.limit, slack=base.slack)


def _log_upper_gamma_quad(a: float, x: float, ctrl: Optional[QuadControl] = None) -> float:
    """
    log Gamma(a, x) by quadrature of the defining integral, any real a, x > 0.

    The integrand is scaled by its maximum and the range split there, so
    orders and arguments in the hundreds or thousands stay in double range.
    """
    ctrl = _relative_ctrl(ctrl)
    what = f"Gamma({a}, {x})"
    if x >= 1.0:
        # Gamma(a, x) = x^{a-1} e^{-x} int_0^inf (1 + v/x)^{a-1} e^{-v} dv
        def log_g(v: float) -> float:
            return (a - 1.0) * math.log1p(v / x) - v

        peak = max(0.0, a - 1.0 - x)
        top = log_g(peak)
        inner = _integrate_scaled(log_g, top, 0.0, peak, ctrl, what)
        return (a - 1.0) * math.log(x) - x + top + math.log(inner)
    # t = e^y removes the t^{a-1} spike at small x
    def log_h(y: float) -> float:
        return a * y - math.exp(min(y, 700.0))

    lo = math.log(x)
    peak = max(lo, math.log(a)) if a > 0 else lo
    top = log_h(peak)
    inner = _integrate_scaled(log_h, top, lo, peak, ctrl, what)
    return top + math.log(inner)


def _integrate_scaled(log_f, top: float, lo: float, peak: float, ctrl: QuadControl, what: str) -> float:
    """int_lo^inf exp(log_f - top), split at the peak of log_f."""
    def f(t: float) -> float:
        return math.exp(log_f(t) - top)

    head = integrate_1d(f, lo, peak, ctrl, what=what) if peak > lo else 0.0
    return head + integrate_1d(f, peak, math.inf, ctrl, what=what)


def _log_upper_gamma_asymptotic(a: float, x: float) -> Optional[float]:
    """
    log Gamma(a, x) from x^{a-1} e^{-x} sum_j (a-1)_(j) x^{-j} for x >> |a|; None when not applicable.
    """
    if x < _ASYMPTOTIC_MIN_RATIO * (abs(a) + 1.0):
        return None
    term = 1.0
    total = 1.0
    for j in range(1, 64):
        previous = abs(term)
        term *= (a - j) / x
        if abs(term) > previous:
            break
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return (a - 1.0) * math.log(x) - x + math.log(total)


def _check_neg_args(a: float, x: float) -> None:
    if not -1.0 <= a < 0.0:
        raise DomainError("a", a, "order must lie in [-1, 0)")
    if x <= 0:
        raise DomainError("x", x, "argument must be positive")


def upper_incomplete_gamma_neg(a: float, x: float, ctrl: Optional[QuadControl] = None) -> float:
    """
    Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt for -1 <= a < 0.

    Uses Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a anchored at
    a+1 in [0, 1) for small x; quadrature of the defining integral elsewhere.

    Examples:
        >>> round(upper_incomplete_gamma_neg(-0.5, 1.0), 7)
        0.1781477
    """
    _check_neg_args(a, x)
    if x <= _RECURRENCE_MAX_X and a <= -_RECURRENCE_MIN_ABS_A:
        ap1 = a + 1.0
        if ap1 == 0.0:
            upper = float(special.exp1(x))
        else:
            upper = float(special.gammaincc(ap1, x) * special.gamma(ap1))
        return (upper - x ** a * math.exp(-x)) / a
    return math.exp(_log_upper_gamma_quad(a, x, ctrl))


def log_upper_incomplete_gamma_neg(a: float, x: float, ctrl: Optional[QuadControl] = None) -> float:
    """log Gamma(a, x) for -1 <= a < 0; stays finite where Gamma(a, x) underflows."""
    _check_neg_args(a, x)
    if x <= _RECURRENCE_MAX_X and a <= -_RECURRENCE_MIN_ABS_A:
        return math.log(upper_incomplete_gamma_neg(a, x, ctrl))
    asym = _log_upper_gamma_asymptotic(a, x)
    return asym if asym is not None else _log_upper_gamma_quad(a, x, ctrl)


def log_upper_gamma(a: float, x: float, ctrl: Optional[QuadControl] = None) -> float:
    """
    log Gamma(a, x) for a >= -1, x > 0.

    Regularized scipy functions where they do not underflow, quadrature
    otherwise.
    """
    if x <= 0:
        raise DomainError("x", x, "argument must be positive")
    if a < -1.0:
        raise DomainError("a", a, "order must be >= -1")
    if a < 0.0:
        return log_upper_incomplete_gamma_neg(a, x, ctrl)
    if a == 0.0:
        e1 = float(special.exp1(x))
        if e1 > 1e-300:
            return math.log(e1)
        asym = _log_upper_gamma_asymptotic(0.0, x)
        return asym if asym is not None else _log_upper_gamma_quad(0.0, x, ctrl)
    q = float(special.gammaincc(a, x))
    if q > 1e-300:
        return float(special.gammaln(a)) + math.log(q)
    asym = _log_upper_gamma_asymptotic(a, x)
    return asym if asym is not None else _log_upper_gamma_quad(a, x, ctrl)


def log_upper_gamma_vec(a: np.ndarray, x: float) -> np.ndarray:
    """
    Elementwise log Gamma(a_i, x) for an array of positive orders.

    Entries whose regularized value underflows are recomputed one by one.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise DomainError("a", a.min(), "orders must be positive")
    if x <= 0:
        raise DomainError("x", x, "argument must be positive")
    q = special.gammaincc(a, x)
    out = np.empty_like(a)
    ok = q > 1e-300
    out[ok] = special.gammaln(a[ok]) + np.log(q[ok])
    for i in np.flatnonzero(~ok):
        asym = _log_upper_gamma_asymptotic(float(a[i]), x)
        out[i] = asym if asym is not None else _log_upper_gamma_quad(float(a[i]), x)
    return out
