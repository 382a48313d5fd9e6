"""
Adaptive quadrature on finite and semi-infinite ranges.

Thin layer over QUADPACK (scipy.integrate.quad): infinite ranges are mapped
onto (0, 1] by QUADPACK's own transformation, results are checked against a
QuadControl and failures surface as AccuracyError with the best estimate.
"""

import math
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from exceptions import AccuracyError, DomainError
from .models import QuadControl

# exp() argument cap when integrating in log s
_LOG_S_MAX = 700.0


def integrate_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    ctrl: Optional[QuadControl] = None,
    what: str = "integral",
) -> float:
    """
    Integrate f over (lo, hi); either limit may be infinite.

    Raises:
        AccuracyError: error estimate above tolerance or non-finite result
    """
    ctrl = ctrl or QuadControl()
    if lo == hi:
        return 0.0
    out = integrate.quad(
        f,
        lo,
        hi,
        epsabs=ctrl.abs_tol,
        epsrel=ctrl.rel_tol,
        limit=ctrl.limit,
        full_output=1,
    )
    value, abserr = float(out[0]), float(out[1])
    if not math.isfinite(value) or not ctrl.accepts(value, abserr):
        raise AccuracyError(what, value, abserr)
    return value


def quad_semi_infinite(
    f: Callable[[float], float],
    a: float,
    ctrl: Optional[QuadControl] = None,
    log_scale: bool = False,
) -> float:
    """
    Integral of f over (a, inf).

    Args:
        f: Integrand
        a: Lower limit, a >= 0
        ctrl: Tolerances
        log_scale: Integrate in x = log s. Use for integrands with a
            1/s-type spike at a small lower limit; a = 0 then maps to -inf.

    Returns:
        The integral value

    Raises:
        DomainError: a < 0
        AccuracyError: tolerance not met within the subdivision cap
    """
    if a < 0:
        raise DomainError("a", a, "lower limit must be nonnegative")
    if not log_scale:
        return integrate_1d(f, a, math.inf, ctrl, what=f"integral over ({a}, inf)")

    def g(x: float) -> float:
        s = math.exp(min(x, _LOG_S_MAX))
        return f(s) * s

    lo = math.log(a) if a > 0 else -math.inf
    return integrate_1d(g, lo, math.inf, ctrl, what=f"log-scale integral over ({a}, inf)")


def quad_log_integrand(
    log_f: Callable[[float], float],
    lo: float,
    hi: float = math.inf,
    ctrl: Optional[QuadControl] = None,
    what: str = "integral",
) -> float:
    """
    log of the integral of exp(log_f(x)) over (lo, hi).

    The integrand is shifted by its value at a coarse grid maximum so that
    integrands living far outside double range are still integrated
    accurately.
    """
    finite_hi = hi if math.isfinite(hi) else (lo + 50.0 if math.isfinite(lo) else 50.0)
    finite_lo = lo if math.isfinite(lo) else finite_hi - 100.0
    grid = np.linspace(finite_lo, finite_hi, 201)
    values = np.array([log_f(x) for x in grid])
    finite = values[np.isfinite(values)]
    shift = float(finite.max()) if finite.size else 0.0

    def g(x: float) -> float:
        v = log_f(x) - shift
        if v > 700.0:
            raise AccuracyError(what, math.inf, math.inf)
        return math.exp(v) if v > -745.0 else 0.0

    value = integrate_1d(g, lo, hi, ctrl, what=what)
    if value <= 0.0:
        return -math.inf
    return shift + math.log(value)


def _locate_peak(log_f: Callable[[float], float], x_guess: float, width: float) -> float:
    """Argmax of a unimodal log integrand, starting from a grid around x_guess."""
    center = x_guess
    for _ in range(20):
        grid = center + np.linspace(-width, width, 121)
        values = np.array([log_f(x) for x in grid])
        if not np.any(np.isfinite(values)):
            center -= 2.0 * width
            continue
        i = int(np.nanargmax(np.where(np.isfinite(values), values, -np.inf)))
        if 0 < i < grid.size - 1:
            step = grid[1] - grid[0]
            res = optimize.minimize_scalar(
                lambda x: -log_f(x),
                bounds=(grid[i] - step, grid[i] + step),
                method="bounded",
            )
            return float(res.x) if -res.fun >= values[i] else float(grid[i])
        center = grid[i]
    return center


def integrate_log_peak(
    log_f: Callable[[float], float],
    x_guess: float,
    ctrl: Optional[QuadControl] = None,
    what: str = "integral",
    drop: float = 50.0,
    width: float = 15.0,
) -> float:
    """
    log of the integral over the real line of exp(log_f(x)), for a unimodal
    log integrand whose tails decay at least linearly.

    The peak is located first; the range is then cut where log_f has fallen
    ``drop`` below the peak and each side is integrated separately.

    Args:
        log_f: log integrand in x
        x_guess: Starting point for the peak search
        ctrl: Tolerances
        what: Label for AccuracyError
        drop: log-scale cut below the peak value
        width: Half-width of the initial search grid

    Returns:
        log of the integral, -inf when the integrand vanishes
    """
    x_peak = _locate_peak(log_f, x_guess, width)
    top = log_f(x_peak)
    if not math.isfinite(top):
        return -math.inf

    def edge(direction: float) -> float:
        step = 1.0
        x = x_peak + direction * step
        for _ in range(60):
            if not log_f(x) > top - drop:
                return x
            step *= 2.0
            x = x_peak + direction * step
        raise AccuracyError(f"{what}: tail cut", top, math.inf)

    lo, hi = edge(-1.0), edge(1.0)
    left = quad_log_integrand(log_f, lo, x_peak, ctrl, what=what)
    right = quad_log_integrand(log_f, x_peak, hi, ctrl, what=what)
    return float(np.logaddexp(left, right))
