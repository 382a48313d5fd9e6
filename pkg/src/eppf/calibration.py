"""
Kappa calibration - choose the total-mass multiplier of an intensity so that
the prior matches a target.

Two targets are supported:
1. pair_tie: p_eps(2) = value (decreasing in kappa)
2. expected_kn: E(K_n) = value (increasing in kappa)

The root is found by bisection in log kappa. Monte Carlo targets restart
from the same seed on every evaluation so the objective is deterministic.
"""

import logging
import math
from typing import Optional

import numpy as np

from config import settings
from crm_core import Intensity, TruncationSpec
from exceptions import CalibrationError
from .evaluation import pair_tie_prob
from .kn import EXACT_KN_MAX_N, prior_kn
from .models import CalibrationPreset, CalibrationResult, CalibrationTarget

logger = logging.getLogger(__name__)


# ============================================================================
# Presets
# ============================================================================

def _pair_tie(value: float) -> CalibrationTarget:
    return CalibrationTarget(kind="pair_tie", value=value)


def _expected_kn(value: float, n: int) -> CalibrationTarget:
    return CalibrationTarget(kind="expected_kn", value=value, n=n)


# Bessel (omega, kappa) settings for p_eps(2) = 0.9 (A), 0.5 (B), 0.1 (C)
PAIR_TIE_PRESETS: dict[str, CalibrationPreset] = {
    name: CalibrationPreset(name=name, omega=omega, kappa=kappa, target=_pair_tie(p2))
    for name, omega, kappa, p2 in [
        ("A1", 100.0, 0.06, 0.9),
        ("A2", 4.0, 0.09, 0.9),
        ("A3", 2.0, 0.1, 0.9),
        ("A4", 1.33, 0.11, 0.9),
        ("A5", 1.05, 0.11, 0.9),
        ("B1", 100.0, 0.43, 0.5),
        ("B2", 4.0, 0.67, 0.5),
        ("B3", 2.0, 0.81, 0.5),
        ("B4", 1.33, 0.93, 0.5),
        ("B5", 1.05, 1.0, 0.5),
        ("C1", 100.0, 1.56, 0.1),
        ("C2", 4.0, 2.67, 0.1),
        ("C3", 2.0, 3.64, 0.1),
        ("C4", 1.33, 5.29, 0.1),
        ("C5", 1.05, 8.95, 0.1),
    ]
}

# Bessel settings with prior E(K_485) = 7 and the resulting prior sd(K_485)
EXPECTED_KN_PRESETS: dict[str, CalibrationPreset] = {
    name: CalibrationPreset(
        name=name, omega=omega, kappa=kappa, target=_expected_kn(7.0, 485), prior_kn_sd=sd
    )
    for name, omega, kappa, sd in [
        ("K1000", 1000.0, 0.98, 2.04),
        ("K10", 10.0, 0.91, 2.13),
        ("K5", 5.0, 0.92, 2.18),
        ("K1.05", 1.05, 1.02, 2.32),
    ]
}

PRESETS: dict[str, CalibrationPreset] = {**PAIR_TIE_PRESETS, **EXPECTED_KN_PRESETS}


def get_preset(name: str) -> CalibrationPreset:
    """Look up a named preset."""
    if name not in PRESETS:
        raise KeyError(f"Unknown preset: {name}. Available: {sorted(PRESETS)}")
    return PRESETS[name]


# ============================================================================
# Calibration
# ============================================================================

class _Objective:
    """h(kappa) for a target, with the prior sd of K_n recorded on the side."""

    def __init__(
        self,
        intensity: Intensity,
        epsilon: float,
        target: CalibrationTarget,
        reps: int,
        seed: int,
    ):
        self.intensity = intensity
        self.epsilon = epsilon
        self.target = target
        self.reps = reps
        self.seed = seed
        self.last_sd: Optional[float] = None
        self.evaluations = 0

    @property
    def increasing(self) -> bool:
        return self.target.kind == "expected_kn"

    def __call__(self, kappa: float) -> float:
        self.evaluations += 1
        trunc = TruncationSpec(epsilon=self.epsilon, kappa=kappa)
        if self.target.kind == "pair_tie":
            value = pair_tie_prob(self.intensity, trunc)
        else:
            n = int(self.target.n)
            kn = prior_kn(
                self.intensity,
                trunc,
                n,
                reps=self.reps,
                rng=np.random.default_rng(self.seed),
                method="exact" if n <= EXACT_KN_MAX_N else "monte_carlo",
            )
            value = kn.mean
            self.last_sd = kn.sd
        logger.debug(f"calibration h(kappa={kappa:.6g}) = {value:.6g}")
        return value


def calibrate_kappa(
    intensity: Intensity,
    epsilon: float,
    target: CalibrationTarget,
    kappa_lo: float = 0.01,
    kappa_hi: float = 10.0,
    tol: float = 0.02,
    reps: Optional[int] = None,
    seed: Optional[int] = None,
    max_expand: int = 8,
    max_iter: int = 60,
) -> CalibrationResult:
    """
    Find kappa with h(kappa) = target.value.

    Args:
        intensity: Lévy intensity with kappa left free
        epsilon: Truncation threshold
        target: pair_tie or expected_kn target
        kappa_lo: Initial lower end of the bracket
        kappa_hi: Initial upper end of the bracket
        tol: Relative tolerance |achieved - target| <= tol * target
        reps: Monte Carlo replicates for expected_kn with n > 12
        seed: Seed for the Monte Carlo objective
        max_expand: Bracket expansions by a factor of 10 on each side
        max_iter: Bisection steps

    Returns:
        CalibrationResult with the achieved value and the final bracket

    Raises:
        CalibrationError: target not bracketed after expansion
    """
    reps = reps or settings.prior_reps
    seed = settings.default_seed if seed is None else seed
    h = _Objective(intensity, epsilon, target, reps, seed)
    sign = 1.0 if h.increasing else -1.0
    v = target.value

    lo, hi = kappa_lo, kappa_hi
    h_lo, h_hi = h(lo), h(hi)
    for _ in range(max_expand):
        if sign * (h_lo - v) <= 0:
            break
        hi, h_hi = lo, h_lo
        lo /= 10.0
        h_lo = h(lo)
    for _ in range(max_expand):
        if sign * (h_hi - v) >= 0:
            break
        lo, h_lo = hi, h_hi
        hi *= 10.0
        h_hi = h(hi)
    if sign * (h_lo - v) > 0 or sign * (h_hi - v) < 0:
        raise CalibrationError(v, (min(h_lo, h_hi), max(h_lo, h_hi)))

    kappa, achieved = (lo, h_lo) if abs(h_lo - v) <= abs(h_hi - v) else (hi, h_hi)
    iterations = 0
    while iterations < max_iter and abs(achieved - v) > 0.1 * tol * v:
        iterations += 1
        mid = math.sqrt(lo * hi)
        h_mid = h(mid)
        if abs(h_mid - v) < abs(achieved - v):
            kappa, achieved = mid, h_mid
        if sign * (h_mid - v) < 0:
            lo, h_lo = mid, h_mid
        else:
            hi, h_hi = mid, h_mid
        if math.log(hi / lo) < 1e-10:
            break

    kn_sd = None
    if target.kind == "expected_kn":
        h(kappa)
        kn_sd = h.last_sd
    converged = abs(achieved - v) <= tol * v
    if not converged:
        logger.warning(
            "Calibration stopped outside tolerance",
            extra={"target": v, "achieved": achieved, "kappa": kappa},
        )
    logger.info(
        "Calibrated kappa",
        extra={
            "family": intensity.kind,
            "target_kind": target.kind,
            "target": v,
            "kappa": kappa,
            "achieved": achieved,
            "evaluations": h.evaluations,
        },
    )
    return CalibrationResult(
        family=intensity.kind,
        params=intensity.params,
        epsilon=epsilon,
        target=target,
        kappa=kappa,
        achieved=achieved,
        kn_sd=kn_sd,
        bracket=(lo, hi),
        iterations=iterations,
        converged=converged,
        seed=seed if target.kind == "expected_kn" else None,
        reps=reps if target.kind == "expected_kn" and (target.n or 0) > EXACT_KN_MAX_N else None,
    )
