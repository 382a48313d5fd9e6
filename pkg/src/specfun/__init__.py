"""
specfun - special functions and quadrature primitives.

Used by every intensity and eppf computation:
- Modified Bessel I_nu by series, plus scaled/log variants
- 2F1(a, b; 1; z) by series with accuracy flagging near z = 1
- Upper incomplete gamma for orders in [-1, 0) and beyond
- Adaptive quadrature over (a, inf), optionally in log s
"""

from .models import SeriesControl, QuadControl, SeriesStats, SERIES_STATS
from .series import (
    bessel_i,
    bessel_i_scaled,
    log_bessel_i,
    hyp2f1_unit_c,
    log_hyp2f1_unit_c,
    log_hyp2f1_half_shift,
)
from .gamma import (
    upper_incomplete_gamma_neg,
    log_upper_incomplete_gamma_neg,
    log_upper_gamma,
    log_upper_gamma_vec,
)
from .quadrature import integrate_1d, quad_semi_infinite, quad_log_integrand, integrate_log_peak

__all__ = [
    # Models
    "SeriesControl",
    "QuadControl",
    "SeriesStats",
    "SERIES_STATS",
    # Series
    "bessel_i",
    "bessel_i_scaled",
    "log_bessel_i",
    "hyp2f1_unit_c",
    "log_hyp2f1_unit_c",
    "log_hyp2f1_half_shift",
    # Gamma
    "upper_incomplete_gamma_neg",
    "log_upper_incomplete_gamma_neg",
    "log_upper_gamma",
    "log_upper_gamma_vec",
    # Quadrature
    "integrate_1d",
    "quad_semi_infinite",
    "quad_log_integrand",
    "integrate_log_peak",
]
