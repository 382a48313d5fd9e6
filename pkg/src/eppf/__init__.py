"""
eppf - partition laws induced by the ε-NormCRM.

Components:
- eppf_eps: exact eppf of the truncated measure by u-quadrature
- eppf_dirichlet / eppf_bessel: untruncated limits
- pair_tie_prob, prior_mean_var_cov: prior moments of P_eps(B)
- prior_kn: law of the number of clusters, exact (n <= 12) or Monte Carlo
- calibrate_kappa: match p_eps(2) or E(K_n), with named presets
"""

from .models import (
    Composition,
    KnDistribution,
    CalibrationTarget,
    CalibrationResult,
    CalibrationPreset,
)
from .evaluation import (
    as_composition,
    expected_total_mass,
    log_eppf_eps_integrand,
    log_eppf_eps,
    eppf_eps,
    log_eppf_dirichlet,
    eppf_dirichlet,
    log_eppf_bessel,
    eppf_bessel,
    bessel_eppf_bounds,
    pair_tie_prob,
    moments_from_tie_prob,
    prior_mean_var_cov,
)
from .moments import MomentEstimate, prior_moments_monte_carlo
from .kn import (
    EXACT_KN_MAX_N,
    integer_partitions,
    prior_kn,
    prior_kn_exact,
    prior_kn_monte_carlo,
)
from .calibration import (
    PAIR_TIE_PRESETS,
    EXPECTED_KN_PRESETS,
    PRESETS,
    get_preset,
    calibrate_kappa,
)

__all__ = [
    # Models
    "Composition",
    "KnDistribution",
    "CalibrationTarget",
    "CalibrationResult",
    "CalibrationPreset",
    "MomentEstimate",
    # Eppf
    "as_composition",
    "expected_total_mass",
    "log_eppf_eps_integrand",
    "log_eppf_eps",
    "eppf_eps",
    "log_eppf_dirichlet",
    "eppf_dirichlet",
    "log_eppf_bessel",
    "eppf_bessel",
    "bessel_eppf_bounds",
    # Prior moments
    "pair_tie_prob",
    "moments_from_tie_prob",
    "prior_mean_var_cov",
    "prior_moments_monte_carlo",
    # K_n
    "EXACT_KN_MAX_N",
    "integer_partitions",
    "prior_kn",
    "prior_kn_exact",
    "prior_kn_monte_carlo",
    # Calibration
    "PAIR_TIE_PRESETS",
    "EXPECTED_KN_PRESETS",
    "PRESETS",
    "get_preset",
    "calibrate_kappa",
]
