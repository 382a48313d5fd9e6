#!/usr/bin/env python3
"""
Tests for eppf: truncated and limiting eppfs, prior moments of P_eps(B),
the law of K_n and kappa calibration.

Run:
    python scripts/test_eppf.py
    pytest scripts/test_eppf.py
"""

import sys
import traceback
from itertools import product
from pathlib import Path

import numpy as np
from pydantic import ValidationError

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from crm_core import BesselIntensity, GammaIntensity, GenGammaIntensity, TruncationSpec, tail_mass
from eppf import (
    CalibrationTarget,
    Composition,
    PRESETS,
    bessel_eppf_bounds,
    calibrate_kappa,
    eppf_bessel,
    eppf_dirichlet,
    eppf_eps,
    get_preset,
    integer_partitions,
    moments_from_tie_prob,
    pair_tie_prob,
    prior_kn,
    prior_kn_exact,
    prior_kn_monte_carlo,
    prior_mean_var_cov,
    prior_moments_monte_carlo,
)
from exceptions import CalibrationError, DomainError


def _compositions(max_n: int):
    for n in range(1, max_n + 1):
        for counts in integer_partitions(n):
            yield Composition(counts)


def _partition_total(eppf, n: int) -> float:
    return sum(Composition(c).set_partition_count() * eppf(Composition(c)) for c in integer_partitions(n))


def _gamma_pair_tie(kappa: float, lam: float) -> float:
    """Small-eps expansion of p_eps(2) for the gamma intensity with omega = 1."""
    return 1.0 / (1.0 + kappa) - kappa / (lam * (1.0 + kappa) ** 2)


def test_dirichlet_examples():
    assert abs(eppf_dirichlet((2,), 1.0) - 0.5) < 1e-15
    assert abs(eppf_dirichlet((1, 1), 1.0) - 0.5) < 1e-15
    assert abs(eppf_dirichlet((3, 1), 2.0) - 8.0 / 120.0) < 1e-15
    for kappa in (0.3, 1.0, 4.0):
        for n in range(1, 7):
            assert abs(_partition_total(lambda c: eppf_dirichlet(c, kappa), n) - 1.0) < 1e-12


def test_eppf_single_item_and_symmetry():
    g = GammaIntensity(1.0)
    trunc = TruncationSpec(epsilon=1e-3, kappa=1.0)
    assert eppf_eps(g, trunc, (1,)) == 1.0
    assert eppf_bessel((1,), 2.0, 1.0) == 1.0
    assert eppf_eps(g, trunc, (2, 1, 3)) == eppf_eps(g, trunc, (3, 2, 1))
    try:
        Composition.of(2, 0)
    except DomainError:
        pass
    else:
        raise AssertionError("empty block should raise DomainError")


def test_gamma_pair_tie_expansion():
    g = GammaIntensity(1.0)
    for kappa in (0.5, 1.0, 2.0):
        trunc = TruncationSpec(epsilon=1e-10, kappa=kappa)
        lam = tail_mass(g, trunc)
        assert abs(pair_tie_prob(g, trunc) - _gamma_pair_tie(kappa, lam)) < 1e-4, kappa


def test_gamma_convergence_to_dirichlet():
    g = GammaIntensity(1.0)
    epsilons = (1e-2, 1e-4, 1e-6, 1e-8)
    for kappa in (0.5, 1.0, 2.0):
        for comp in ((2,), (2, 1), (1, 1, 1), (3, 1, 1)):
            gaps = []
            for epsilon in epsilons:
                trunc = TruncationSpec(epsilon=epsilon, kappa=kappa)
                gaps.append(abs(eppf_eps(g, trunc, comp) - eppf_dirichlet(comp, kappa)))
            assert gaps[-1] < gaps[0], (kappa, comp, gaps)
        # p_eps(2) closes on the Dirichlet value like kappa / (Lambda_eps (1 + kappa)^2)
        leading = kappa / (1.0 + kappa) ** 2
        for epsilon in epsilons[2:]:
            trunc = TruncationSpec(epsilon=epsilon, kappa=kappa)
            lam = tail_mass(g, trunc)
            gap = eppf_dirichlet((2,), kappa) - eppf_eps(g, trunc, (2,))
            assert abs(lam * gap - leading) < 0.05 * leading, (kappa, epsilon, lam * gap)


def test_partition_normalization():
    cases = [
        (GammaIntensity(1.0), 1.0, 6),
        (GenGammaIntensity(0.5, 1.0), 0.5, 6),
        (BesselIntensity(2.0), 1.0, 6),
        (BesselIntensity(1.05), 1.0, 4),
    ]
    for intensity, kappa, max_n in cases:
        trunc = TruncationSpec(epsilon=1e-6, kappa=kappa)
        for n in range(2, max_n + 1):
            total = _partition_total(lambda c: eppf_eps(intensity, trunc, c), n)
            assert abs(total - 1.0) < 1e-4, (intensity, n, total)


def test_addition_rule():
    for intensity in (GammaIntensity(1.0), BesselIntensity(2.0)):
        trunc = TruncationSpec(epsilon=1e-3, kappa=1.0)
        for comp in _compositions(4):
            children = [comp.grow(i) for i in range(comp.k)] + [comp.grow()]
            total = sum(eppf_eps(intensity, trunc, c) for c in children)
            assert abs(eppf_eps(intensity, trunc, comp) - total) < 1e-6, (intensity, comp)


def test_bessel_limit_bounds():
    lower, upper = bessel_eppf_bounds((2, 2, 1), 2.0, 1.0)
    value = eppf_bessel((2, 2, 1), 2.0, 1.0)
    assert lower <= value <= upper
    for omega, kappa in product((1.05, 2.0, 5.0), (0.5, 1.0, 3.0)):
        for comp in _compositions(4):
            lower, upper = bessel_eppf_bounds(comp, omega, kappa)
            value = eppf_bessel(comp, omega, kappa)
            assert lower * (1 - 1e-9) <= value <= upper * (1 + 1e-9), (omega, kappa, comp)


def test_bessel_large_omega_is_dirichlet():
    for kappa in (0.98, 2.0):
        for comp in _compositions(4):
            p_b = eppf_bessel(comp, 1000.0, kappa)
            p_d = eppf_dirichlet(comp, kappa)
            assert abs(p_b - p_d) / p_d < 1e-2, (kappa, comp)
    p_b = eppf_bessel((2, 1, 1), 1000.0, 1.0)
    p_d = eppf_dirichlet((2, 1, 1), 1.0)
    assert abs(p_b - p_d) / p_d < 1e-3


def test_bessel_normalization_untruncated():
    for omega in (1.05, 2.0):
        for n in range(2, 6):
            total = _partition_total(lambda c: eppf_bessel(c, omega, 1.0), n)
            assert abs(total - 1.0) < 1e-5, (omega, n)


def test_truncated_bessel_approaches_untruncated():
    b = BesselIntensity(2.0)
    gaps = []
    for epsilon in (1e-2, 1e-4, 1e-6):
        trunc = TruncationSpec(epsilon=epsilon, kappa=1.0)
        gaps.append(abs(eppf_eps(b, trunc, (2, 1)) - eppf_bessel((2, 1), 2.0, 1.0)))
    assert gaps[0] > gaps[1] > gaps[2]


def test_pair_tie_small_kappa():
    g = GammaIntensity(1.0)
    assert pair_tie_prob(g, TruncationSpec(epsilon=1e-6, kappa=1e-4)) > 0.99
    # p_eps(2) decreases in kappa
    values = [pair_tie_prob(g, TruncationSpec(epsilon=1e-6, kappa=k)) for k in (0.1, 0.5, 1.0, 5.0)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_moment_formulas():
    assert moments_from_tie_prob(0.5, (0.5, 0.5, 0.5))[1] == 0.125
    mean, var, cov = moments_from_tie_prob(0.2, (0.3, 0.4, 0.0))
    assert mean == 0.3
    assert abs(var - 0.2 * 0.3 * 0.7) < 1e-15
    assert abs(cov + 0.024) < 1e-15
    for bad in ((0.5, 0.4, 0.45), (1.2, 0.1, 0.0), (0.7, 0.6, 0.1)):
        try:
            moments_from_tie_prob(0.5, bad)
        except DomainError:
            pass
        else:
            raise AssertionError(f"inconsistent masses {bad} should raise DomainError")


def test_moments_against_monte_carlo():
    g = GammaIntensity(1.0)
    trunc = TruncationSpec(epsilon=1e-2, kappa=1.0)
    rng = np.random.default_rng(21)
    for masses in ((0.5, 0.5, 0.5), (0.3, 0.4, 0.0), (0.6, 0.5, 0.3)):
        mean, var, cov = prior_mean_var_cov(g, trunc, masses)
        est = prior_moments_monte_carlo(g, trunc, masses, 100_000, rng)
        assert abs(est.mean - mean) < 4 * est.mean_se, masses
        assert abs(est.var - var) < 4 * est.var_se, masses
        assert abs(est.cov - cov) < 4 * max(est.cov_se, 1e-12), masses


def test_integer_partitions():
    assert list(integer_partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert [len(list(integer_partitions(n))) for n in range(1, 9)] == [1, 2, 3, 5, 7, 11, 15, 22]
    bell = [1, 2, 5, 15, 52, 203]
    for n, b in enumerate(bell, start=1):
        assert sum(Composition(c).set_partition_count() for c in integer_partitions(n)) == b


def test_prior_kn_exact_and_monte_carlo():
    g = GammaIntensity(1.0)
    assert prior_kn(g, TruncationSpec(epsilon=1e-8, kappa=1.0), 1).probs.tolist() == [1.0]

    trunc = TruncationSpec(epsilon=1e-8, kappa=1.0)
    exact = prior_kn(g, trunc, 2)
    assert exact.method == "exact"
    assert abs(exact.probs[0] - pair_tie_prob(g, trunc)) < 1e-12
    assert abs(exact.probs.sum() - 1.0) < 1e-4

    trunc = TruncationSpec(epsilon=1e-2, kappa=1.0)
    exact = prior_kn_exact(5, lambda c: eppf_eps(g, trunc, c))
    mc = prior_kn_monte_carlo(g, trunc, 5, 40_000, np.random.default_rng(22))
    assert abs(mc.probs.sum() - 1.0) < 1e-12
    for k in range(5):
        if mc.se[k] > 0:
            assert abs(mc.probs[k] - exact.probs[k]) < 4 * mc.se[k] + 1e-4, k
    assert abs(mc.mean - exact.mean) < 4 * mc.mean_se


def test_prior_kn_errors():
    g = GammaIntensity(1.0)
    trunc = TruncationSpec(epsilon=1e-2, kappa=1.0)
    for call in (lambda: prior_kn(g, trunc, 0), lambda: prior_kn(g, trunc, 20, method="exact")):
        try:
            call()
        except DomainError:
            pass
        else:
            raise AssertionError("invalid K_n request should raise DomainError")


def test_presets():
    assert len(PRESETS) == 19
    a5 = get_preset("A5")
    assert (a5.omega, a5.kappa, a5.target.value) == (1.05, 0.11, 0.9)
    k1000 = get_preset("K1000")
    assert (k1000.omega, k1000.kappa, k1000.prior_kn_sd) == (1000.0, 0.98, 2.04)
    assert k1000.target.n == 485
    try:
        get_preset("Z9")
    except KeyError:
        pass
    else:
        raise AssertionError("unknown preset should raise KeyError")


def test_calibration_targets_validate():
    for bad in (dict(kind="pair_tie", value=1.0), dict(kind="expected_kn", value=3.0),
                dict(kind="expected_kn", value=6.0, n=5)):
        try:
            CalibrationTarget(**bad)
        except ValidationError:
            pass
        else:
            raise AssertionError(f"CalibrationTarget({bad}) should fail validation")


def test_calibrate_pair_tie_round_trip():
    g = GammaIntensity(1.0)
    result = calibrate_kappa(g, 1e-6, CalibrationTarget(kind="pair_tie", value=0.5))
    assert result.converged
    achieved = pair_tie_prob(g, TruncationSpec(epsilon=1e-6, kappa=result.kappa))
    assert abs(achieved - 0.5) <= 0.02 * 0.5
    assert result.bracket[0] <= result.kappa <= result.bracket[1]


def test_calibrate_expected_kn_exact():
    g = GammaIntensity(1.0)
    target = CalibrationTarget(kind="expected_kn", value=2.5, n=5)
    result = calibrate_kappa(g, 1e-3, target)
    assert result.converged
    kn = prior_kn(g, TruncationSpec(epsilon=1e-3, kappa=result.kappa), 5)
    assert abs(kn.mean - 2.5) <= 0.02 * 2.5
    assert result.kn_sd is not None and abs(result.kn_sd - kn.sd) < 1e-9


def test_calibration_unbracketed():
    g = GammaIntensity(1.0)
    try:
        calibrate_kappa(g, 1e-6, CalibrationTarget(kind="pair_tie", value=0.5),
                        kappa_lo=5.0, kappa_hi=10.0, max_expand=0)
    except CalibrationError as e:
        assert "0.5" in str(e)
    else:
        raise AssertionError("unbracketed target should raise CalibrationError")


TESTS = [
    ("Dirichlet eppf", test_dirichlet_examples),
    ("Single item / symmetry", test_eppf_single_item_and_symmetry),
    ("Gamma pair tie expansion", test_gamma_pair_tie_expansion),
    ("Gamma convergence", test_gamma_convergence_to_dirichlet),
    ("Partition normalization", test_partition_normalization),
    ("Addition rule", test_addition_rule),
    ("Bessel bounds", test_bessel_limit_bounds),
    ("Bessel large omega", test_bessel_large_omega_is_dirichlet),
    ("Bessel normalization", test_bessel_normalization_untruncated),
    ("Truncated Bessel limit", test_truncated_bessel_approaches_untruncated),
    ("Pair tie, small kappa", test_pair_tie_small_kappa),
    ("Moment formulas", test_moment_formulas),
    ("Moments vs Monte Carlo", test_moments_against_monte_carlo),
    ("Integer partitions", test_integer_partitions),
    ("K_n exact vs Monte Carlo", test_prior_kn_exact_and_monte_carlo),
    ("K_n errors", test_prior_kn_errors),
    ("Presets", test_presets),
    ("Calibration targets", test_calibration_targets_validate),
    ("Calibrate pair tie", test_calibrate_pair_tie_round_trip),
    ("Calibrate E(K_n)", test_calibrate_expected_kn_exact),
    ("Calibration bracket", test_calibration_unbracketed),
]


def main() -> int:
    """Run every test and print a summary."""
    print("\n" + "=" * 70)
    print("🚀 EPPF TESTS")
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
