#!/usr/bin/env python3
"""
Tests for crm_core: intensities, tail masses, jump samplers, Laplace
exponents and the Bessel total-mass law.

Run:
    python scripts/test_crm_core.py
    pytest scripts/test_crm_core.py
"""

import math
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import ValidationError
from scipy import integrate, special, stats

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from crm_core import (
    BesselIntensity,
    EpsRealization,
    GammaIntensity,
    GenGammaIntensity,
    IntensityConfig,
    SamplingStats,
    TruncationSpec,
    bessel_finite_activity_rate,
    bessel_total_mass_cdf,
    bessel_total_mass_sampler,
    build_intensity,
    laplace_exponent,
    laplace_exponent_quad,
    sample_jumps,
    sample_prior_jump_sets,
    sample_prior_realization,
    tail_mass,
    tilted_moment,
    tilted_tail_mass,
)
from exceptions import DomainError

FAMILIES = [
    GammaIntensity(1.0),
    GammaIntensity(2.5),
    GenGammaIntensity(0.5, 1.0),
    GenGammaIntensity(0.25, 3.0),
    BesselIntensity(1.05),
    BesselIntensity(2.0),
]


def _moment(intensity, trunc, u, m):
    return tilted_tail_mass(intensity, trunc, u) if m == 0 else tilted_moment(intensity, trunc, u, m)


def _mean_and_sd(intensity, epsilon, u, power):
    """Mean and sd of the law s^power e^{-u s} rho(s) on (eps, inf), from tilted moments."""
    trunc = TruncationSpec(epsilon=epsilon, kappa=1.0)
    m0 = _moment(intensity, trunc, u, power)
    m1 = _moment(intensity, trunc, u, power + 1)
    m2 = _moment(intensity, trunc, u, power + 2)
    mean = m1 / m0
    return mean, math.sqrt(m2 / m0 - mean * mean)


def test_gamma_tail_masses():
    g = GammaIntensity(1.0)
    trunc = TruncationSpec(epsilon=1.0, kappa=1.0)
    assert abs(tail_mass(g, trunc) - 0.21938393439552) < 1e-12
    assert abs(tilted_tail_mass(g, trunc, 1.0) - 0.04890051070806112) < 1e-12
    assert abs(tilted_moment(g, trunc, 1.0, 1) - math.exp(-2.0) / 2.0) < 1e-12
    assert abs(tail_mass(g, trunc.with_kappa(3.0)) - 3.0 * 0.21938393439552) < 1e-11
    assert tail_mass(g, TruncationSpec(epsilon=50.0, kappa=1.0)) < 1e-20


def test_tilted_integrals_match_quadrature():
    for intensity in FAMILIES:
        for epsilon in (1e-6, 0.01, 1.0):
            for u in (0.0, 0.7, 5.0):
                for m in (0, 1, 3):
                    closed = intensity.log_tilted_integral(epsilon, u, m)
                    quad = intensity.log_tilted_integral_quad(epsilon, u, m)
                    assert abs(closed - quad) <= 1e-7 * max(1.0, abs(quad)), (intensity, epsilon, u, m)


def test_bessel_series_against_termwise_sum():
    b = BesselIntensity(2.0)
    epsilon, u, m = 1e-6, 0.5, 2
    r = b.omega + u
    ref = 0.0
    for j in range(60):
        order = m + 2 * j
        ref += special.gammaincc(order, r * epsilon) * special.gamma(order) / (
            r ** order * math.factorial(j) ** 2 * 4.0 ** j
        )
    value = tilted_moment(b, TruncationSpec(epsilon=epsilon, kappa=1.0), u, m)
    assert abs(value - ref) <= 1e-10 * ref


def test_tail_masses_monotone():
    for intensity in FAMILIES:
        trunc = TruncationSpec(epsilon=1e-3, kappa=1.0)
        lam = tail_mass(intensity, trunc)
        previous = lam
        for u in (0.1, 1.0, 10.0, 100.0):
            tilted = tilted_tail_mass(intensity, trunc, u)
            assert tilted <= previous * (1 + 1e-12)
            previous = tilted
        epsilons = [1e-8, 1e-6, 1e-4, 1e-2, 1.0]
        masses = [tail_mass(intensity, TruncationSpec(epsilon=e, kappa=1.0)) for e in epsilons]
        assert all(b < a for a, b in zip(masses, masses[1:])), intensity


def test_bessel_dominates_gamma():
    s = np.exp(np.linspace(-10.0, 4.0, 200))
    for omega in (1.0, 1.05, 2.0):
        diff = BesselIntensity(omega).log_rho(s) - GammaIntensity(omega).log_rho(s)
        assert np.all(diff >= -1e-12)
        trunc = TruncationSpec(epsilon=1e-4, kappa=1.0)
        assert tail_mass(BesselIntensity(omega), trunc) > tail_mass(GammaIntensity(omega), trunc)


def test_gengamma_at_zero_is_gamma():
    s = np.exp(np.linspace(-8.0, 3.0, 50))
    assert np.allclose(GenGammaIntensity(0.0, 1.5).log_rho(s), GammaIntensity(1.5).log_rho(s))
    trunc = TruncationSpec(epsilon=0.01, kappa=2.0)
    assert abs(tail_mass(GenGammaIntensity(0.0, 1.5), trunc) - tail_mass(GammaIntensity(1.5), trunc)) < 1e-10


def test_bessel_finite_activity_rate():
    assert abs(bessel_finite_activity_rate(1.0) - math.log(2.0)) < 1e-14
    for omega in (1.05, 2.0, 10.0):
        closed = math.log(2.0 * omega / (omega + math.sqrt(omega * omega - 1.0)))
        assert abs(bessel_finite_activity_rate(omega) - closed) < 1e-12
        ref, _ = integrate.quad(
            lambda s: (special.ive(0, s) - math.exp(-s)) * math.exp(-(omega - 1.0) * s) / s,
            0.0, math.inf, limit=500,
        )
        assert abs(bessel_finite_activity_rate(omega) - ref) < 1e-6, omega


def test_sample_jumps_gamma_reference_mean():
    rng = np.random.default_rng(1)
    draws = sample_jumps(GammaIntensity(1.0), 1.0, 0.0, 0, 100_000, rng)
    assert np.all(draws > 1.0)
    mean = math.exp(-1.0) / 0.21938393439552
    assert abs(mean - 1.676875) < 1e-5
    se = draws.std() / math.sqrt(draws.size)
    assert abs(draws.mean() - mean) < 4 * se

    # power 2 at a tiny threshold is essentially gamma(2, 1)
    draws = sample_jumps(GammaIntensity(1.0), 1e-6, 0.0, 2, 50_000, rng)
    se = draws.std() / math.sqrt(draws.size)
    assert abs(draws.mean() - 2.0) < 4 * se


def test_sample_jumps_match_tilted_moments():
    rng = np.random.default_rng(2)
    size = 40_000
    for intensity in FAMILIES:
        for epsilon, u, power in ((1e-6, 0.0, 0), (0.01, 1.0, 3), (0.5, 4.0, 1)):
            draws = sample_jumps(intensity, epsilon, u, power, size, rng)
            assert draws.shape == (size,)
            assert np.all(draws > epsilon)
            mean, sd = _mean_and_sd(intensity, epsilon, u, power)
            assert abs(draws.mean() - mean) < 4 * sd / math.sqrt(size), (intensity, epsilon, u, power)


def test_sample_jumps_errors():
    rng = np.random.default_rng(0)
    g = GammaIntensity(1.0)
    for args in ((0.0, 0.0, 0), (1e-3, -1.0, 0), (1e-3, 0.0, -1)):
        try:
            sample_jumps(g, *args, 5, rng)
        except DomainError:
            pass
        else:
            raise AssertionError(f"sample_jumps{args} should raise DomainError")
    try:
        sample_jumps(BesselIntensity(1.0), 1e-3, 0.0, 2, 5, rng)
    except DomainError:
        pass
    else:
        raise AssertionError("Bessel omega = 1 with u = 0 and power >= 1 is improper")


def test_prior_counts_are_poisson():
    rng = np.random.default_rng(3)
    g = GammaIntensity(1.0)
    trunc = TruncationSpec(epsilon=0.01, kappa=2.0)
    lam = tail_mass(g, trunc)
    assert abs(lam - 2.0 * float(special.exp1(0.01))) < 1e-10
    reps = 20_000
    counts = np.array([jumps.size - 1 for jumps in sample_prior_jump_sets(g, trunc, reps, rng)])

    edges = list(range(4, 16))
    observed = [np.sum(counts < 4)] + [np.sum(counts == k) for k in edges] + [np.sum(counts >= 16)]
    pois = stats.poisson(lam)
    expected = [pois.cdf(3)] + [pois.pmf(k) for k in edges] + [pois.sf(15)]
    expected = np.array(expected) * reps
    _, p_value = stats.chisquare(observed, expected)
    assert p_value > 1e-3, p_value


def test_prior_realization_mean_measure():
    rng = np.random.default_rng(4)
    intensity = BesselIntensity(1.05)
    trunc = TruncationSpec(epsilon=1e-3, kappa=1.0)
    lam = tail_mass(intensity, trunc)
    base = lambda r, size: r.normal(size=(size, 1))
    values = []
    for _ in range(2000):
        real = sample_prior_realization(intensity, trunc, base, rng, lam=lam)
        assert abs(real.weights.sum() - 1.0) < 1e-12
        assert real.n_atoms == real.n_eps + 1
        values.append(real.measure_of(real.locations[:, 0] <= 0.0))
    values = np.array(values)
    se = values.std() / math.sqrt(values.size)
    assert abs(values.mean() - 0.5) < 4 * se


def test_large_threshold_gives_single_atom():
    rng = np.random.default_rng(5)
    trunc = TruncationSpec(epsilon=30.0, kappa=1.0)
    base = lambda r, size: r.normal(size=(size, 1))
    for _ in range(200):
        real = sample_prior_realization(GammaIntensity(1.0), trunc, base, rng)
        assert real.n_atoms == 1
        assert real.weights[0] == 1.0


def test_laplace_exponents():
    assert laplace_exponent(GammaIntensity(1.0), 2.0, 0.0) == 0.0
    assert abs(laplace_exponent(GammaIntensity(1.0), 2.0, 1.0) - 2.0 * math.log(2.0)) < 1e-12
    assert abs(laplace_exponent(BesselIntensity(1.0), 1.0, 1.0) - math.log(2.0 + math.sqrt(3.0))) < 1e-12
    assert abs(laplace_exponent(GenGammaIntensity(0.5, 1.0), 1.0, 1.0) - 2.0 * (math.sqrt(2.0) - 1.0)) < 1e-12
    for intensity in FAMILIES:
        for lam in (0.1, 1.0, 7.0):
            closed = laplace_exponent(intensity, 1.5, lam)
            quad = laplace_exponent_quad(intensity, 1.5, lam)
            assert abs(closed - quad) <= 1e-7 * closed, (intensity, lam)
    try:
        laplace_exponent(GammaIntensity(1.0), 1.0, -1.0)
    except DomainError:
        pass
    else:
        raise AssertionError("negative lam should raise DomainError")


def test_bessel_total_mass_laplace_transform():
    rng = np.random.default_rng(6)
    for omega in (1.0, 1.05, 3.0):
        draws = bessel_total_mass_sampler(omega, 1.0, rng, size=100_000)
        for lam in (0.5, 1.0, 2.0):
            values = np.exp(-lam * draws)
            se = values.std() / math.sqrt(values.size)
            target = math.exp(-laplace_exponent(BesselIntensity(omega), 1.0, lam))
            assert abs(values.mean() - target) < 4 * se, (omega, lam)


def test_bessel_total_mass_large_omega_is_gamma_like():
    rng = np.random.default_rng(7)
    omega, kappa = 1000.0, 0.98
    draws = bessel_total_mass_sampler(omega, kappa, rng, size=50_000)
    mean = kappa / math.sqrt(omega * omega - 1.0)
    se = draws.std() / math.sqrt(draws.size)
    assert abs(draws.mean() - mean) < 4 * se
    assert isinstance(bessel_total_mass_sampler(omega, kappa, rng), float)


def test_bessel_total_mass_ks():
    rng = np.random.default_rng(8)
    draws = bessel_total_mass_sampler(1.0, 1.0, rng, size=20_000)
    result = stats.kstest(draws, lambda t: bessel_total_mass_cdf(t, 1.0, 1.0))
    assert result.pvalue > 1e-3, result


def test_realization_validation():
    try:
        EpsRealization(jumps=np.array([0.5, 0.001]), locations=np.zeros(2), epsilon=0.01)
    except DomainError:
        pass
    else:
        raise AssertionError("jumps at or below eps should raise DomainError")
    try:
        EpsRealization(jumps=np.array([]), locations=np.zeros((0, 1)), epsilon=0.01)
    except DomainError:
        pass
    else:
        raise AssertionError("empty realization should raise DomainError")
    for args in ((0.0, 1.0), (0.1, -1.0)):
        try:
            TruncationSpec(*args)
        except DomainError:
            pass
        else:
            raise AssertionError(f"TruncationSpec{args} should raise DomainError")


def test_intensity_construction():
    for bad in (lambda: BesselIntensity(0.9), lambda: GammaIntensity(0.0),
                lambda: GenGammaIntensity(1.0), lambda: build_intensity("stable")):
        try:
            bad()
        except DomainError:
            pass
        else:
            raise AssertionError("invalid intensity should raise DomainError")
    try:
        IntensityConfig(kind="bessel", omega=0.5)
    except ValidationError:
        pass
    else:
        raise AssertionError("bessel omega < 1 should fail validation")
    assert IntensityConfig(kind="gengamma", sigma=0.3, omega=2.0).build() == GenGammaIntensity(0.3, 2.0)
    assert IntensityConfig().build() == BesselIntensity(1.05)


class _CubicIntensity(GammaIntensity):
    """s^{-3} e^{-s}: int min(1, s) rho(s) ds diverges at zero."""

    def log_rho(self, s):
        s = np.asarray(s, dtype=float)
        return -3.0 * np.log(s) - s

    def log_tilted_integral(self, epsilon, u, m):
        return self.log_tilted_integral_quad(epsilon, u, m)


def test_every_family_constructs():
    for build in (
        lambda: GammaIntensity(1.0),
        lambda: GammaIntensity(0.3),
        lambda: GenGammaIntensity(0.5, 1.0),
        lambda: GenGammaIntensity(0.9, 2.0),
        lambda: BesselIntensity(1.0),
        lambda: BesselIntensity(1.05),
        lambda: BesselIntensity(2.0),
        lambda: BesselIntensity(1000.0),
    ):
        intensity = build()
        assert math.isfinite(intensity.log_tilted_integral(1.0, 0.0, 0)), intensity
    try:
        _CubicIntensity(1.0)
    except DomainError:
        pass
    else:
        raise AssertionError("a non-integrable small-jump part should raise DomainError")


def test_bessel_sampler_piece_weights():
    # omega close to 1 gives very different acceptance rates below and above the split
    intensity = BesselIntensity(1.05)
    epsilon, split = 1e-6, 0.25
    rng = np.random.default_rng(12)
    size = 200_000
    draws = intensity.sample_tilted(epsilon, 0.0, 1, size, rng)
    assert np.all(draws > epsilon)

    def density(s):
        return math.exp(-0.05 * s) * special.ive(0, s)

    head = integrate.quad(density, epsilon, split)[0]
    tail = integrate.quad(density, split, math.inf, limit=200)[0]
    p = head / (head + tail)
    assert abs(np.mean(draws < split) - p) < 4 * math.sqrt(p * (1 - p) / size), (np.mean(draws < split), p)


def test_bessel_total_mass_cdf_heavy_tail():
    t = np.array([0.1, 1.0, 1e3, 1e6, 614799427444.46, 1e14, 1e17])
    cdf = bessel_total_mass_cdf(t, 1.0, 1.0)
    assert np.all(np.isfinite(cdf))
    assert np.all(np.diff(cdf) >= 0) and cdf[-1] == 1.0
    assert 0.99 < cdf[4] <= 1.0


def test_sampling_stats_thread_safe():
    counters = SamplingStats()
    rounds = 20_000

    def work(_):
        for _ in range(rounds):
            counters.record(2, 1)
        counters.record_degraded(3)

    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(work, range(8)))
    assert counters.to_dict()["proposals"] == 8 * rounds * 2
    assert counters.accepted == 8 * rounds and counters.degraded_draws == 24
    assert counters.acceptance_rate == 0.5
    counters.reset()
    assert counters.proposals == 0 and counters.acceptance_rate is None



TESTS = [
    ("Every family constructs", test_every_family_constructs),
    ("Gamma tail masses", test_gamma_tail_masses),
    ("Tilted integrals vs quadrature", test_tilted_integrals_match_quadrature),
    ("Bessel series", test_bessel_series_against_termwise_sum),
    ("Tail masses monotone", test_tail_masses_monotone),
    ("Bessel >= gamma", test_bessel_dominates_gamma),
    ("Generalized gamma at sigma = 0", test_gengamma_at_zero_is_gamma),
    ("Bessel finite-activity rate", test_bessel_finite_activity_rate),
    ("Jump sampler reference mean", test_sample_jumps_gamma_reference_mean),
    ("Jump sampler moments", test_sample_jumps_match_tilted_moments),
    ("Jump sampler errors", test_sample_jumps_errors),
    ("Poisson atom counts", test_prior_counts_are_poisson),
    ("Prior mean measure", test_prior_realization_mean_measure),
    ("Large threshold", test_large_threshold_gives_single_atom),
    ("Laplace exponents", test_laplace_exponents),
    ("Bessel total mass Laplace transform", test_bessel_total_mass_laplace_transform),
    ("Bessel total mass, large omega", test_bessel_total_mass_large_omega_is_gamma_like),
    ("Bessel total mass KS", test_bessel_total_mass_ks),
    ("Bessel sampler piece weights", test_bessel_sampler_piece_weights),
    ("Bessel total mass CDF tail", test_bessel_total_mass_cdf_heavy_tail),
    ("Sampling counters across threads", test_sampling_stats_thread_safe),
    ("Realization validation", test_realization_validation),
    ("Intensity construction", test_intensity_construction),
]


def main() -> int:
    """Run every test and print a summary."""
    print("\n" + "=" * 70)
    print("🚀 CRM CORE TESTS")
    print("=" * 70)

    results = []
    for name, test in TESTS:
        print("\n" + "=" * 70)
        print(f"🧪 {name}")
        print("=" * 70)
        try:
            test()
            print(f"✅ {name}")
            results.append((name, True))
        except Exception as e:
            print(f"❌ {type(e).__name__}: {e}")
            traceback.print_exc()
            results.append((name, False))

    print("\n" + "=" * 70)
    print("📊 SUMMARY")
    print("=" * 70)
    passed = sum(1 for _, ok in results if ok)
    for name, ok in results:
        print(f"{'✅ PASSED' if ok else '❌ FAILED'} - {name}")
    print(f"\nРезультат: {passed}/{len(results)}")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
