"""
crm_core - Lévy intensities and the ε-truncated CRM.

Components:
- Intensity: gamma, generalized gamma and Bessel families
- TruncationSpec / EpsRealization: the truncated measure and its draws
- Jump samplers for tilted intensities s^power e^{-u s} rho(s) on (eps, inf)
- Laplace exponents and the Bessel total-mass law
"""

from .models import (
    TruncationSpec,
    EpsRealization,
    IntensityConfig,
    IntensityKind,
    SamplingStats,
    SAMPLING_STATS,
)
from .intensity import (
    Intensity,
    GammaIntensity,
    GenGammaIntensity,
    BesselIntensity,
    INTENSITY_FAMILIES,
    build_intensity,
    bessel_finite_activity_rate,
)
from .sampling import KernelPiece, log_power_exp_mass, sample_kernel_mixture, sample_power_exp
from .operations import (
    BaseSampler,
    tail_mass,
    tilted_tail_mass,
    log_tilted_tail_mass,
    tilted_moment,
    log_tilted_moment,
    sample_jump,
    sample_jumps,
    sample_prior_realization,
    sample_prior_jump_sets,
    laplace_exponent,
    laplace_exponent_quad,
    bessel_total_mass_sampler,
    bessel_total_mass_logpdf,
    bessel_total_mass_cdf,
)

__all__ = [
    # Models
    "TruncationSpec",
    "EpsRealization",
    "IntensityConfig",
    "IntensityKind",
    "SamplingStats",
    "SAMPLING_STATS",
    # Intensities
    "Intensity",
    "GammaIntensity",
    "GenGammaIntensity",
    "BesselIntensity",
    "INTENSITY_FAMILIES",
    "build_intensity",
    "bessel_finite_activity_rate",
    # Sampling
    "KernelPiece",
    "log_power_exp_mass",
    "sample_kernel_mixture",
    "sample_power_exp",
    # Operations
    "BaseSampler",
    "tail_mass",
    "tilted_tail_mass",
    "log_tilted_tail_mass",
    "tilted_moment",
    "log_tilted_moment",
    "sample_jump",
    "sample_jumps",
    "sample_prior_realization",
    "sample_prior_jump_sets",
    "laplace_exponent",
    "laplace_exponent_quad",
    "bessel_total_mass_sampler",
    "bessel_total_mass_logpdf",
    "bessel_total_mass_cdf",
]
