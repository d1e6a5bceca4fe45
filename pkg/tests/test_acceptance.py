"""Acceptance gate: thirteen cross-method criteria with hard tolerances.

Each test prints one PASS/FAIL line (bypassing capture) and then asserts,
so a plain ``pytest -v`` run leaves a complete scoreboard.
"""

import math
import time
from fractions import Fraction

import mpmath
from mpmath import workprec

from invwalk import asymptotics as asy
from invwalk import chain, formulas, genfun, simulate, spectral
from invwalk.genfun import Polynomial, RationalFunction


def report(capsys, num: int, ok: bool, detail: str) -> None:
    with capsys.disabled():  # the scoreboard must survive passing tests
        print(f"{'PASS' if ok else 'FAIL'} criterion {num:2d}: {detail}",
              flush=True)


def test_criterion_01_printed_generating_functions(capsys):
    start = time.monotonic()
    one_minus_t = Polynomial([1, -1])
    printed = {
        1: RationalFunction(Polynomial([0, 1]), Polynomial([1, 0, -1])),
        2: RationalFunction(Polynomial([0, 2, 1]),
                            one_minus_t * Polynomial([2, -1]) * Polynomial([1, 1])),
        3: RationalFunction(3 * Polynomial([0, 27, 9, -7, -1]),
                            one_minus_t * Polynomial([9, 6, -1])
                            * Polynomial([9, -6, -1])),
        4: RationalFunction(Polynomial([0, 256, -192, -48, 44, -5]),
                            one_minus_t * Polynomial([16, 0, -5])
                            * Polynomial([16, -20, 5])),
    }
    mismatches = [m for m, ref in printed.items()
                  if (lambda g: g.num != ref.num or g.den != ref.den)
                  (genfun.build_gf(m))]
    elapsed = time.monotonic() - start
    ok = not mismatches and elapsed < 1.0
    report(capsys, 1, ok, f"generating functions m=1..4 expanded equality, "
                  f"mismatches={mismatches}, {elapsed:.2f}s (< 1 s)")
    assert ok


def test_criterion_02_four_way_agreement_grid(capsys):
    start = time.monotonic()
    worst_rel = 0.0
    exact_failures = []
    for m in range(1, 9):
        dp_values = list(chain.iterate_totals(m, 25))
        if genfun.series(genfun.build_gf(m), 25) != dp_values:
            exact_failures.append(("gf", m))
        for n in range(26):
            if formulas.eriksen(m, n) != dp_values[n]:
                exact_failures.append(("eriksen", m, n))
            approx = formulas.closed_form(
                m, n, formulas.ClosedFormOptions(precision=128))
            with workprec(200):
                exact = mpmath.mpf(dp_values[n].numerator) / dp_values[n].denominator
                rel = float(abs(approx - exact) / max(1, abs(exact)))
            worst_rel = max(worst_rel, rel)
    elapsed = time.monotonic() - start
    ok = not exact_failures and worst_rel <= 1e-9 and elapsed < 120
    report(capsys, 2, ok, f"dp = eriksen = series(gf) exactly and closed form within "
                  f"1e-9 rel (worst {worst_rel:.2e}) for m<=8, n<=25, "
                  f"{elapsed:.1f}s (< 2 min)")
    assert ok


def test_criterion_03_trig_identity_suite(capsys):
    start = time.monotonic()
    worst = 0.0
    failures = []
    for m in range(1, 201):
        for precision, drop in ((53, 46), (128, 120)):
            table = spectral.build_table(m, precision)
            tol = (m + 1) ** 3 * math.ldexp(1, -drop)
            residual = spectral.verify_identities(table).max_residual
            worst = max(worst, residual / tol)
            if residual >= tol:
                failures.append((m, precision))
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < 30
    report(capsys, 3, ok, f"seven identities, m=1..200 at 53/128 bits, worst "
                  f"residual/tol {worst:.2e}, failures={failures}, "
                  f"{elapsed:.1f}s (< 30 s)")
    assert ok


def test_criterion_04_spectral_certification(capsys):
    start = time.monotonic()
    worst = 0.0
    passed = True
    for m in (2, 3):
        result = spectral.certify_spectrum(m, tol=1e-8)
        worst = max(worst, max(result["residuals"].values()))
        passed = passed and result["passed"]
    elapsed = time.monotonic() - start
    ok = passed and elapsed < 10
    report(capsys, 4, ok, f"all certified x_jk are characteristic roots for m=2,3; "
                  f"worst |det| {worst:.2e} (< 1e-8), {elapsed:.1f}s (< 10 s)")
    assert ok


def test_criterion_05_functional_equation_residual(capsys):
    start = time.monotonic()
    residuals = {(m, N): chain.functional_equation_residual(m, N)
                 for m, N in ((1, 6), (2, 6), (3, 5))}
    elapsed = time.monotonic() - start
    ok = all(r == 0 for r in residuals.values()) and elapsed < 30
    report(capsys, 5, ok, f"truncated functional equation residuals "
                  f"{set(residuals.values())} (exactly 0) for (1,6),(2,6),(3,5), "
                  f"{elapsed:.1f}s (< 30 s)")
    assert ok


def test_criterion_06_sandwich_bounds(capsys):
    start = time.monotonic()
    violations = []
    for m in range(3, 13):
        for n, value in enumerate(chain.iterate_totals(m, 300)):
            pair = formulas.bounds(m, n)
            if not (formulas.exact_fraction(pair.lower) <= value
                    <= formulas.exact_fraction(pair.upper)):
                violations.append((m, n))
    elapsed = time.monotonic() - start
    ok = not violations and elapsed < 60
    report(capsys, 6, ok, f"lower <= dp <= upper for m in [3,12], n <= 300, "
                  f"violations={violations}, {elapsed:.1f}s (< 1 min)")
    assert ok


def test_criterion_07_linear_regime(capsys):
    start = time.monotonic()
    f1 = asy.f_kappa(1.0)
    devs = [abs(chain.expected_inversions_float(m, m) / m - f1)
            for m in (100, 150, 200)]
    decreasing = devs[0] > devs[1] > devs[2]
    capped = devs[2] <= 0.06
    f001 = asy.f_kappa(0.01)
    series_ok = abs(f001 - 0.99005) <= 1e-4
    elapsed = time.monotonic() - start
    ok = decreasing and capped and series_ok and elapsed < 60
    report(capsys, 7, ok, f"|dp_float(m,m)/m - f(1)| = {[f'{d:.2e}' for d in devs]} "
                  f"decreasing={decreasing}, cap {devs[2]:.4f} <= 0.06; "
                  f"f(0.01) = {f001:.7f} within 1e-4 of 0.99005: {series_ok}; "
                  f"{elapsed:.1f}s (< 1 min)")
    assert ok


def test_criterion_08_cubic_regime(capsys):
    start = time.monotonic()
    g1 = asy.g_kappa(1.0)
    devs = [abs(float(formulas.closed_form(m, m**3)) / m**2 - g1)
            for m in (20, 30, 40)]
    decreasing = devs[0] > devs[1] > devs[2]
    elapsed = time.monotonic() - start
    ok = decreasing and elapsed < 30
    report(capsys, 8, ok, f"|closed(m,m^3)/m^2 - g(1)| = {[f'{d:.2e}' for d in devs]} "
                  f"decreasing={decreasing}, {elapsed:.1f}s (< 30 s)")
    assert ok


def test_criterion_09_intermediate_regime(capsys):
    start = time.monotonic()
    target = math.sqrt(2 / math.pi)
    r100 = float(formulas.closed_form(100, 100**2)) / math.sqrt(100 * 100**2)
    r200 = float(formulas.closed_form(200, 200**2)) / math.sqrt(200 * 200**2)
    in_band = 0.72 <= r100 <= 0.88
    improves = abs(r200 - target) < abs(r100 - target)
    elapsed = time.monotonic() - start
    ok = in_band and improves and elapsed < 10
    report(capsys, 9, ok, f"closed/sqrt(mn) at m=100, n=m^2: {r100:.5f} in [0.72, 0.88]: "
                  f"{in_band}; deviation shrinks at m=200 ({abs(r200 - target):.4f}"
                  f" < {abs(r100 - target):.4f}): {improves}; "
                  f"{elapsed:.1f}s (< 10 s)")
    assert ok


def test_criterion_10_consistency_limits(capsys):
    start = time.monotonic()
    target = math.sqrt(2 / math.pi)
    f_side = math.sqrt(100) * asy.f_kappa(100.0, method="quadrature")
    g_side = asy.g_kappa(1e-4) / math.sqrt(1e-4)
    f_ok = abs(f_side - target) / target <= 0.02
    g_ok = abs(g_side - target) / target <= 0.02
    elapsed = time.monotonic() - start
    ok = f_ok and g_ok and elapsed < 10
    report(capsys, 10, ok, f"sqrt(k)f(k)|k=100 = {f_side:.5f} "
                   f"({abs(f_side - target) / target:.2%} off, <= 2%: {f_ok}); "
                   f"g(k)/sqrt(k)|k=1e-4 = {g_side:.5f} "
                   f"({abs(g_side - target) / target:.2%} off, <= 2%: {g_ok}); "
                   f"{elapsed:.1f}s (< 10 s)")
    assert ok


def test_criterion_11_critical_window(capsys):
    start = time.monotonic()
    results = {}
    for m in (60, 100):
        for alpha in (0, 1):
            n = asy.critical_step_count(m, alpha)
            error = abs(float(formulas.closed_form(m, n))
                        - asy.critical_estimate(m, alpha))
            correction = 16 * m / math.pi**4 * math.exp(-alpha * math.pi**2)
            results[(m, alpha)] = error / correction
    within = all(results[(60, a)] <= 0.25 for a in (0, 1))
    improves = all(results[(100, a)] < results[(60, a)] for a in (0, 1))
    elapsed = time.monotonic() - start
    ok = within and improves and elapsed < 10
    ratios = {k: f"{v:.3f}" for k, v in results.items()}
    report(capsys, 11, ok, f"|closed - estimate| / correction {ratios}; "
                   f"m=60 both <= 0.25: {within}; improvement at m=100: "
                   f"{improves}; {elapsed:.1f}s (< 10 s)")
    assert ok


def test_criterion_12_monte_carlo(capsys):
    start = time.monotonic()
    seed = 20260823
    misses = []
    identical = True
    for m in (5, 10, 20):
        for n in (10, 100, 1000):
            one = simulate.monte_carlo(m, n, 100000, seed=seed, workers=1)
            four = simulate.monte_carlo(m, n, 100000, seed=seed, workers=4)
            identical = identical and one.key_fields() == four.key_fields()
            exact = float(chain.expected_inversions_dp(m, n))
            if abs(one.mean - exact) > 4 * one.stderr:
                misses.append((m, n))
    elapsed = time.monotonic() - start
    ok = len(misses) <= 1 and identical and elapsed < 120
    report(capsys, 12, ok, f"4-sigma agreement on 3x3 grid at 1e5 trials, misses="
                   f"{misses or 'none'} (<= 1 allowed); worker bit-identity: "
                   f"{identical}; {elapsed:.1f}s (< 2 min)")
    assert ok


def test_criterion_13_brute_force_ground_truth(capsys):
    start = time.monotonic()
    mismatches = [(m, n) for m in (1, 2, 3) for n in range(9)
                  if chain.expected_inversions_dp(m, n)
                  != chain.brute_force_expected(m, n)]
    elapsed = time.monotonic() - start
    ok = not mismatches and elapsed < 60
    report(capsys, 13, ok, f"dp equals exhaustive enumeration for m <= 3, n <= 8, "
                   f"mismatches={mismatches}, {elapsed:.1f}s (< 1 min)")
    assert ok
