"""
Jump samplers for densities of the form s^{a-1} e^{-r s} h(s) on (lo, hi).

Every intensity family reduces its tilted jump law
s^power e^{-u s} rho(s) 1(s > eps) to one or two such kernels:

1. a > 0, r > 0, h = 1: exact inverse CDF of the truncated gamma law
2. a <= 0 or deep upper tail: rejection from a two-piece envelope
   (power law on (lo, s0), exponential beyond s0)
3. h < 1 (Bessel correction): extra acceptance step on top of 1-2

A rejection loop that does not finish within the configured cap falls back
to inverse-CDF on a grid; those draws are counted in
``SAMPLING_STATS.degraded_draws``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from config import settings
from exceptions import DomainError
from specfun import log_upper_gamma
from .models import SAMPLING_STATS

logger = logging.getLogger(__name__)

LogH = Optional[Callable[[np.ndarray], np.ndarray]]

_MIN_BATCH = 16
_GRID_POINTS = 4097


# ============================================================================
# Kernel masses
# ============================================================================

def _log_power_law_mass(a: float, lo: float, hi: float) -> float:
    """log of int_lo^hi s^{a-1} ds."""
    if hi <= lo:
        return -math.inf
    if a == 0.0:
        return math.log(math.log(hi / lo))
    if math.isinf(hi):
        if a >= 0:
            raise DomainError("a", a, "power law with a >= 0 has infinite mass on (lo, inf)")
        return a * math.log(lo) - math.log(-a)
    return math.log((hi ** a - lo ** a) / a)


def log_power_exp_mass(a: float, r: float, lo: float, hi: float = math.inf) -> float:
    """log of int_lo^hi s^{a-1} e^{-r s} ds for a >= -1, lo > 0."""
    if r == 0.0:
        return _log_power_law_mass(a, lo, hi)
    l1 = log_upper_gamma(a, r * lo)
    if math.isinf(hi):
        diff = l1
    else:
        l2 = log_upper_gamma(a, r * hi)
        if l2 >= l1:
            return -math.inf
        diff = l1 + math.log1p(-math.exp(l2 - l1))
    return diff - a * math.log(r)


# ============================================================================
# Exact inverse CDF for the truncated gamma law
# ============================================================================

def _truncated_gamma(
    a: float, r: float, lo: float, hi: float, size: int, rng: np.random.Generator
) -> Optional[np.ndarray]:
    x_lo, x_hi = r * lo, r * hi
    v = rng.random(size)
    if x_lo > a:
        q_lo = special.gammaincc(a, x_lo)
        q_hi = 0.0 if math.isinf(x_hi) else special.gammaincc(a, x_hi)
        if not q_lo > 1e-290:
            return None
        x = special.gammainccinv(a, q_hi + (1.0 - v) * (q_lo - q_hi))
    else:
        p_lo = special.gammainc(a, x_lo)
        p_hi = 1.0 if math.isinf(x_hi) else special.gammainc(a, x_hi)
        x = special.gammaincinv(a, p_lo + v * (p_hi - p_lo))
    s = x / r
    if not np.all(np.isfinite(s)):
        return None
    return np.clip(s, np.nextafter(lo, math.inf), hi)


# ============================================================================
# Rejection from the two-piece envelope
# ============================================================================

class _Envelope:
    """
    Dominating density for t(s) = (a-1) log s - r s on (lo, hi).

    Piece A on (lo, s0): s^{a-1} e^{-r lo}, valid since e^{-r s} <= e^{-r lo}.
    Piece B on (s0, hi): exponential through t(s0) with slope t'(s0) for a > 1
    (t concave there) and slope -r for a <= 1 (s^{a-1} <= s0^{a-1}).
    """

    def __init__(self, a: float, r: float, lo: float, hi: float):
        if r == 0.0 and math.isinf(hi) and a >= 0:
            raise DomainError("(a, r)", (a, r), "kernel is not normalizable")
        self.a, self.r, self.lo, self.hi = a, r, lo, hi
        if r > 0:
            s0 = max(lo, 1.0 / r, a / r if a > 1 else 0.0)
        else:
            s0 = hi
        self.s0 = min(s0, hi)
        self.rate_b = r - max(a - 1.0, 0.0) / self.s0 if self.s0 < hi else r

        self.log_w_a = (
            -r * lo + _log_power_law_mass(a, lo, self.s0) if self.s0 > lo else -math.inf
        )
        if self.s0 < hi:
            span = hi - self.s0
            log_tail = 0.0 if math.isinf(span) else math.log1p(-math.exp(-self.rate_b * span))
            self.log_w_b = self._log_t(self.s0) + log_tail - math.log(self.rate_b)
        else:
            self.log_w_b = -math.inf
        top = max(self.log_w_a, self.log_w_b)
        w_a = math.exp(self.log_w_a - top)
        w_b = math.exp(self.log_w_b - top)
        self.p_a = w_a / (w_a + w_b)

    def _log_t(self, s):
        return (self.a - 1.0) * np.log(s) - self.r * s

    def propose(self, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Draw from the envelope; returns (s, log t(s) - log env(s))."""
        in_a = rng.random(size) < self.p_a
        v = rng.random(size)
        s = np.empty(size)
        log_ratio = np.empty(size)

        na = int(in_a.sum())
        if na:
            va = v[in_a]
            if self.a == 0.0:
                sa = self.lo * np.exp(va * math.log(self.s0 / self.lo))
            else:
                lo_a = self.lo ** self.a
                hi_a = self.s0 ** self.a
                sa = (lo_a + va * (hi_a - lo_a)) ** (1.0 / self.a)
            sa = np.clip(sa, np.nextafter(self.lo, math.inf), self.s0)
            s[in_a] = sa
            log_ratio[in_a] = -self.r * (sa - self.lo)

        nb = size - na
        if nb:
            vb = v[~in_a]
            span = self.hi - self.s0
            if math.isinf(span):
                sb = self.s0 - np.log1p(-vb) / self.rate_b
            else:
                sb = self.s0 - np.log1p(-vb * -math.expm1(-self.rate_b * span)) / self.rate_b
            sb = np.clip(sb, np.nextafter(self.s0, math.inf), self.hi)
            s[~in_a] = sb
            log_env = self._log_t(self.s0) - self.rate_b * (sb - self.s0)
            log_ratio[~in_a] = self._log_t(sb) - log_env
        return s, np.minimum(log_ratio, 0.0)


def _grid_inverse_cdf(
    a: float, r: float, lo: float, hi: float, log_h: LogH, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Inverse-CDF on a log-spaced grid; approximate."""
    top = hi if math.isfinite(hi) else (lo + 60.0 / r if r > 0 else lo * 1e12)
    x = np.linspace(math.log(lo), math.log(top), _GRID_POINTS)
    s = np.exp(x)
    log_dens = (a - 1.0) * x - r * s + x
    if log_h is not None:
        log_dens = log_dens + log_h(s)
    dens = np.exp(log_dens - log_dens.max())
    cdf = integrate.cumulative_trapezoid(dens, x, initial=0.0)
    cdf /= cdf[-1]
    draws = np.exp(np.interp(rng.random(size), cdf, x))
    return np.clip(draws, np.nextafter(lo, math.inf), top)


def sample_power_exp(
    a: float,
    r: float,
    lo: float,
    size: int,
    rng: np.random.Generator,
    hi: float = math.inf,
    log_h: LogH = None,
    cap: Optional[int] = None,
) -> np.ndarray:
    """
    iid draws from the density proportional to s^{a-1} e^{-r s} h(s) on (lo, hi).

    Args:
        a: Power parameter (a >= -1)
        r: Exponential rate (r >= 0)
        lo: Lower truncation point, lo > 0
        size: Number of draws
        rng: Random generator
        hi: Upper truncation point
        log_h: Optional log h with h <= 1
        cap: Maximum rejection rounds before falling back to the grid

    Returns:
        Array of ``size`` draws, each in (lo, hi]
    """
    if lo <= 0:
        raise DomainError("lo", lo, "lower truncation must be positive")
    if r < 0:
        raise DomainError("r", r, "rate must be nonnegative")
    if size == 0:
        return np.empty(0)

    first = None
    if a > 0 and r > 0:
        first = _truncated_gamma(a, r, lo, hi, size, rng)
        if first is not None and log_h is None:
            return first

    if first is not None:
        def propose(batch: int) -> tuple[np.ndarray, np.ndarray]:
            return _truncated_gamma(a, r, lo, hi, batch, rng), np.zeros(batch)
        pending = (first, np.zeros(size))
    else:
        envelope = _Envelope(a, r, lo, hi)

        def propose(batch: int) -> tuple[np.ndarray, np.ndarray]:
            return envelope.propose(batch, rng)
        pending = None

    cap = cap or settings.rejection_cap
    accepted: list[np.ndarray] = []
    n_accepted = 0
    for _ in range(cap):
        if pending is not None:
            s, log_ratio = pending
            pending = None
        else:
            s, log_ratio = propose(max(2 * (size - n_accepted), _MIN_BATCH))
        if log_h is not None:
            log_ratio = log_ratio + log_h(s)
        keep = np.log(rng.random(s.size)) < log_ratio
        SAMPLING_STATS.record(int(s.size), int(keep.sum()))
        accepted.append(s[keep])
        n_accepted += int(keep.sum())
        if n_accepted >= size:
            break

    out = np.concatenate(accepted)[:size]
    missing = size - out.size
    if missing > 0:
        SAMPLING_STATS.record_degraded(missing)
        logger.warning(
            "Rejection cap reached, using grid inversion",
            extra={"a": a, "r": r, "lo": lo, "missing": missing},
        )
        out = np.concatenate([out, _grid_inverse_cdf(a, r, lo, hi, log_h, missing, rng)])
    return out


# ============================================================================
# Several kernels glued into one envelope
# ============================================================================

@dataclass(frozen=True)
class KernelPiece:
    """
    One envelope piece c s^{a-1} e^{-r s} on (lo, hi), with log c = log_scale.

    ``log_h`` is log(target / piece) on (lo, hi) and must be <= 0 there.
    """
    a: float
    lo: float
    hi: float
    log_h: Callable[[np.ndarray], np.ndarray]
    log_scale: float = 0.0


def sample_kernel_mixture(
    pieces: Sequence[KernelPiece],
    r: float,
    size: int,
    rng: np.random.Generator,
    fallback: tuple[float, LogH],
    cap: Optional[int] = None,
) -> np.ndarray:
    """
    iid draws from a target dominated piecewise by ``pieces``.

    Each proposal picks a piece with probability proportional to its
    envelope mass, draws from that kernel and is accepted with probability
    h(s); a rejected proposal draws a fresh piece.

    Args:
        pieces: Envelope pieces on disjoint ranges
        r: Exponential rate shared by all pieces
        size: Number of draws
        rng: Random generator
        fallback: (a, log_h) of the target as s^{a-1} e^{-r s} h(s) over the
            union of the ranges, for grid inversion when the cap is reached
        cap: Maximum rejection rounds

    Returns:
        Array of ``size`` draws
    """
    if size == 0:
        return np.empty(0)
    log_mass = np.array([
        p.log_scale + log_power_exp_mass(p.a, r, p.lo, p.hi) if p.hi > p.lo else -math.inf
        for p in pieces
    ])
    probs = np.exp(log_mass - log_mass.max())
    probs /= probs.sum()

    cap = cap or settings.rejection_cap
    accepted: list[np.ndarray] = []
    n_accepted = 0
    for _ in range(cap):
        batch = max(2 * (size - n_accepted), _MIN_BATCH)
        counts = rng.multinomial(batch, probs)
        s = np.empty(batch)
        log_h = np.empty(batch)
        start = 0
        for piece, count in zip(pieces, counts):
            if not count:
                continue
            stop = start + int(count)
            s[start:stop] = sample_power_exp(piece.a, r, piece.lo, int(count), rng, hi=piece.hi)
            log_h[start:stop] = piece.log_h(s[start:stop])
            start = stop
        order = rng.permutation(batch)
        s, log_h = s[order], log_h[order]
        keep = np.log(rng.random(batch)) < log_h
        SAMPLING_STATS.record(batch, int(keep.sum()))
        accepted.append(s[keep])
        n_accepted += int(keep.sum())
        if n_accepted >= size:
            break

    out = np.concatenate(accepted)[:size]
    missing = size - out.size
    if missing > 0:
        SAMPLING_STATS.record_degraded(missing)
        logger.warning(
            "Rejection cap reached, using grid inversion",
            extra={"a": fallback[0], "r": r, "lo": pieces[0].lo, "missing": missing},
        )
        lo, hi = pieces[0].lo, pieces[-1].hi
        out = np.concatenate([out, _grid_inverse_cdf(fallback[0], r, lo, hi, fallback[1], missing, rng)])
    return out
