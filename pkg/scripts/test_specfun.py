#!/usr/bin/env python3
"""
Tests for specfun: Bessel and 2F1 series, incomplete gamma, quadrature.

Run:
    python scripts/test_specfun.py
    pytest scripts/test_specfun.py
"""

import math
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy import integrate, special

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from exceptions import DomainError, RangeError
from specfun import (
    QuadControl,
    SeriesControl,
    SeriesStats,
    bessel_i,
    bessel_i_scaled,
    hyp2f1_unit_c,
    integrate_log_peak,
    log_bessel_i,
    log_hyp2f1_half_shift,
    log_hyp2f1_unit_c,
    log_upper_gamma,
    quad_semi_infinite,
    upper_incomplete_gamma_neg,
)


def _gamma_neg_half(x: float) -> float:
    """Gamma(-1/2, x) in closed form."""
    return 2.0 * (x ** -0.5 * math.exp(-x) - math.sqrt(math.pi) * math.erfc(math.sqrt(x)))


def test_bessel_i_values():
    assert bessel_i(0, 0) == 1.0
    assert bessel_i(1, 0) == 0.0
    assert abs(bessel_i(0, 1) - 1.2660658777520084) < 1e-14
    for nu in (0.0, 0.5, 1.0, 2.5, 7.0):
        for s in (0.01, 0.7, 5.0, 40.0, 300.0):
            ref = special.iv(nu, s)
            assert abs(bessel_i(nu, s) - ref) <= 1e-12 * ref, (nu, s)


def test_bessel_i_monotone_and_scaled():
    grid = np.linspace(0.0, 50.0, 201)
    values = np.array([bessel_i(0, s) for s in grid])
    assert np.all(values >= 1.0)
    assert np.all(np.diff(values) > 0)
    assert abs(bessel_i_scaled(0, 10.0) - math.exp(-10.0) * bessel_i(0, 10.0)) < 1e-15
    assert abs(float(log_bessel_i(0, 2000.0)) - (2000.0 - 0.5 * math.log(2 * math.pi * 2000.0))) < 1e-3


def test_bessel_i_errors():
    for args in ((-1.0, 1.0), (0.0, -1.0)):
        try:
            bessel_i(*args)
        except DomainError:
            pass
        else:
            raise AssertionError(f"bessel_i{args} should raise DomainError")
    try:
        bessel_i(0, 800.0)
    except RangeError:
        pass
    else:
        raise AssertionError("bessel_i(0, 800) should raise RangeError")


def test_hyp2f1_examples():
    assert hyp2f1_unit_c(1.5, 2.0, 0.0) == 1.0
    assert abs(hyp2f1_unit_c(1, 1, 0.5) - 2.0) < 1e-12
    assert abs(hyp2f1_unit_c(0.5, 1, 0.36) - 1.25) < 1e-12
    for a, b, z in ((0.5, 1.0, 0.3), (2.0, 2.5, 0.8), (5.0, 5.5, 0.99)):
        ref = special.hyp2f1(a, b, 1.0, z)
        assert abs(hyp2f1_unit_c(a, b, z) - ref) <= 1e-9 * ref


def test_hyp2f1_monotone_in_z():
    zs = np.linspace(0.0, 0.95, 40)
    values = [hyp2f1_unit_c(2.0, 2.5, z) for z in zs]
    assert all(b >= a for a, b in zip(values, values[1:]))
    try:
        hyp2f1_unit_c(1.0, 1.0, 1.0)
    except DomainError:
        pass
    else:
        raise AssertionError("z = 1 should raise DomainError")


def test_hyp2f1_log_large_argument_stays_finite():
    value = log_hyp2f1_unit_c(200.0, 200.5, 0.9, SeriesControl(max_terms=100_000))
    assert math.isfinite(value) and value > 700.0


def test_hyp2f1_half_shift_matches_series():
    for n in range(1, 8):
        for w in (1.0, 0.9, 0.5, 0.05, 1e-3):
            z = 1.0 - w
            ref = math.log(special.hyp2f1(n / 2.0, (n + 1) / 2.0, 1.0, z))
            assert abs(log_hyp2f1_half_shift(n, w) - ref) <= 1e-10 * max(1.0, abs(ref)), (n, w)


def test_upper_incomplete_gamma_neg_values():
    assert abs(upper_incomplete_gamma_neg(-0.5, 1.0) - 0.1781477) < 5e-7
    assert abs(upper_incomplete_gamma_neg(-0.5, 0.25) - _gamma_neg_half(0.25)) < 1e-10
    rng = np.random.default_rng(11)
    for a, x in zip(rng.uniform(-1.0, -0.01, 60), np.exp(rng.uniform(-6.0, 3.0, 60))):
        ref, _ = integrate.quad(lambda t: t ** (a - 1.0) * math.exp(-t), x, math.inf, epsabs=0, epsrel=1e-12, limit=500)
        assert abs(upper_incomplete_gamma_neg(a, x) - ref) <= 1e-8 * ref, (a, x)


def test_upper_incomplete_gamma_neg_decreasing_and_domain():
    xs = np.exp(np.linspace(-5.0, 4.0, 50))
    values = [upper_incomplete_gamma_neg(-0.3, x) for x in xs]
    assert all(b < a for a, b in zip(values, values[1:]))
    try:
        upper_incomplete_gamma_neg(-0.5, 0.0)
    except DomainError:
        pass
    else:
        raise AssertionError("x = 0 should raise DomainError")


def test_log_upper_gamma_far_tail():
    # Gamma(a, x) ~ x^{a-1} e^{-x} far in the tail
    for a in (-0.5, 0.0, 1.0, 3.5):
        x = 1e4
        approx = (a - 1.0) * math.log(x) - x
        assert abs(log_upper_gamma(a, x) - approx) < 1e-3, a


def test_quad_semi_infinite_known_integrals():
    assert abs(quad_semi_infinite(lambda s: math.exp(-s), 0.0) - 1.0) < 1e-9
    assert abs(quad_semi_infinite(lambda s: s * math.exp(-s), 0.0) - 1.0) < 1e-9
    assert abs(quad_semi_infinite(lambda s: math.exp(-s) / s, 1.0) - 0.21938393439552) < 1e-11
    cases = []
    for k in range(1, 11):
        cases.append((lambda s, k=k: s ** (k - 1) * math.exp(-s), 0.0, math.gamma(k), False))
    for a in (0.01, 0.1, 0.5, 2.0, 5.0):
        cases.append((lambda s: math.exp(-s) / s, a, float(special.exp1(a)), True))
    for rate in (0.5, 2.0, 3.0, 10.0, 0.1):
        cases.append((lambda s, r=rate: math.exp(-r * s), 0.0, 1.0 / rate, False))
    assert len(cases) == 20
    for f, a, ref, log_scale in cases:
        value = quad_semi_infinite(f, a, QuadControl(abs_tol=0.0, rel_tol=1e-11), log_scale=log_scale)
        assert abs(value - ref) <= 1e-9 * ref, (a, ref, value)


def test_integrate_log_peak_gamma_functions():
    for n in (1, 5, 50, 500):
        # int u^{n-1} e^{-u} du in x = log u
        log_value = integrate_log_peak(lambda x, n=n: n * x - math.exp(x), x_guess=0.0)
        assert abs(log_value - math.lgamma(n)) < 1e-8 * max(1.0, math.lgamma(n)), n


def test_controls_validate():
    for bad in (dict(max_terms=0), dict(rel_tol=0.0), dict(rel_tol=1.0)):
        try:
            SeriesControl(**bad)
        except DomainError:
            pass
        else:
            raise AssertionError(f"SeriesControl({bad}) should raise")


def test_log_upper_gamma_large_order_and_argument():
    # integer a: Gamma(a, x) = (a-1)! e^{-x} sum_{k<a} x^k / k!
    for a, x in ((100, 1291.18), (50, 900.0), (300, 2500.0), (100, 120.0)):
        k = np.arange(a)
        exact = math.lgamma(a) - x + float(special.logsumexp(k * math.log(x) - special.gammaln(k + 1.0)))
        value = log_upper_gamma(float(a), x)
        assert math.isfinite(value)
        assert abs(value - exact) <= 1e-9 * abs(exact), (a, x, value, exact)


def test_series_stats_thread_safe():
    counters = SeriesStats()

    def work(_):
        for _ in range(20_000):
            counters.flag_hyp2f1()

    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(work, range(8)))
    assert counters.to_dict() == {"hyp2f1_flagged": 160_000}



TESTS = [
    ("Bessel I values", test_bessel_i_values),
    ("Bessel I monotone / scaled", test_bessel_i_monotone_and_scaled),
    ("Bessel I errors", test_bessel_i_errors),
    ("2F1 examples", test_hyp2f1_examples),
    ("2F1 monotone in z", test_hyp2f1_monotone_in_z),
    ("2F1 log scale", test_hyp2f1_log_large_argument_stays_finite),
    ("2F1 Euler form", test_hyp2f1_half_shift_matches_series),
    ("Gamma(a, x), a < 0", test_upper_incomplete_gamma_neg_values),
    ("Gamma(a, x) monotone", test_upper_incomplete_gamma_neg_decreasing_and_domain),
    ("log Gamma(a, x) tail", test_log_upper_gamma_far_tail),
    ("log Gamma(a, x), large a and x", test_log_upper_gamma_large_order_and_argument),
    ("Series counters across threads", test_series_stats_thread_safe),
    ("Semi-infinite quadrature", test_quad_semi_infinite_known_integrals),
    ("Peak-located quadrature", test_integrate_log_peak_gamma_functions),
    ("Control validation", test_controls_validate),
]


def main() -> int:
    """Run every test and print a summary."""
    print("\n" + "=" * 70)
    print("🚀 SPECFUN TESTS")
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
