"""Regime laws for I_{m,n} when n scales with m.

Linear regime: I/n -> f(n/m); intermediate: I/sqrt(mn) -> sqrt(2/pi);
cubic: I/m^2 -> g(n/m^3); critical n ~ m^3 log m / pi^2 window with a
refined m-linear correction.  ``predict`` classifies (m, n) by
engineering thresholds (the crossovers are asymptotic, not sharp) and
clamps into the rigorous sandwich bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mpf, workprec

from .formulas import bounds

REGIMES = ("sublinear", "linear", "intermediate", "cubic", "critical_log", "supercubic")


@dataclass(frozen=True)
class RegimeEstimate:
    regime: str
    predicted: float
    normalizer: str
    kappa: float | None
    clamped: bool
    lower: float
    upper: float


def f_kappa(kappa: float, method: str = "series", tol: float = 1e-10) -> float:
    """Linear-regime ratio f(kappa) = lim I_{m, kappa m} / (kappa m).

    ``series``: alternating entire series sum_j (-1)^j (2j)! (2k)^j / (j!(j+1)!^2),
    summed at enough extra precision to absorb the ~e^{8 kappa} cancellation.
    ``quadrature``: (1/(2 pi k)) int_0^inf (1 - exp(-8k t^2/(1+t^2)))/(t^2(1+t^2)) dt
    with the tail beyond T bounded by 1/(3T^3).
    """
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if kappa == 0:
        return 1.0
    if method == "series":
        return _f_series(kappa, tol)
    if method == "quadrature":
        return _f_quadrature(kappa, tol)
    raise ValueError(f"method must be 'series' or 'quadrature', got {method!r}")


def _f_series(kappa: float, tol: float) -> float:
    # Largest term ~ exp(8 kappa); add that many bits plus slack.
    extra = int(8 * kappa * 1.4427) + 64
    with workprec(53 + extra):
        k2 = 2 * mpf(kappa)
        total = mpf(0)
        term = mpf(1)  # j = 0
        j = 0
        hump = 8 * kappa
        while True:
            total += term
            if abs(term) < tol / 8 and j > hump:
                break
            # ratio t_{j+1}/t_j = -(2j+1)(2j+2) (2k) / ((j+1)(j+2)^2)
            term = term * (-(2 * j + 1) * (2 * j + 2)) * k2 / ((j + 1) * (j + 2) ** 2)
            j += 1
            if j > 100000:
                raise RuntimeError("f_kappa series failed to converge")
        return float(total)


def _f_quadrature(kappa: float, tol: float) -> float:
    with workprec(150):
        k = mpf(kappa)
        prefactor = 1 / (2 * mpmath.pi() * k)
        # Tail: integrand <= 1/(t^2(1+t^2)) <= 1/t^4, so beyond T the
        # contribution is below prefactor/(3 T^3).
        T = (1 / (3 * prefactor * (tol / 2))) ** mpf("1/3")

        def integrand(t):
            if t == 0:
                return 8 * k
            t2 = t * t
            return -mpmath.expm1(-8 * k * t2 / (1 + t2)) / (t2 * (1 + t2))

        value = prefactor * mpmath.quad(integrand, [0, 1, T])
        return float(value)


def g_kappa(kappa: float, tol: float = 1e-12) -> float:
    """Cubic-regime ratio g(kappa) = 1/4 - (16/pi^4) (sum_j e^{-k pi^2 (2j+1)^2/2}/(2j+1)^2)^2.

    The theta-like series is truncated once the analytic tail bound
    (geometric-in-j^2 decay under the 1/(2j+1)^2 envelope) drops below the
    requested accuracy.  kappa <= 0 is an error: the series only converges
    for positive kappa (the kappa -> 0+ limit is 0 but is not computed).
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    with workprec(120):
        k = mpf(kappa)
        pi2 = mpmath.pi() ** 2
        rate = k * pi2 / 2
        # |dg| <= (32/pi^4) * S * tail with S <= pi^2/8, so tail <= tol*pi^2/4 works.
        tail_target = tol * pi2 / 4
        total = mpf(0)
        j = 0
        while True:
            total += mpmath.exp(-rate * (2 * j + 1) ** 2) / (2 * j + 1) ** 2
            tail_bound = mpmath.exp(-rate * (2 * j + 3) ** 2) * pi2 / 8
            if tail_bound < tail_target:
                break
            j += 1
            if j > 1000000:
                raise RuntimeError("g_kappa series failed to converge")
        return float(mpf(1) / 4 - 16 / pi2**2 * total**2)


def critical_estimate(m: int, alpha: float) -> float:
    """Refined estimate in the n ~ m^3 log m / pi^2 + alpha m^3 window."""
    if m < 3:
        raise ValueError(f"m must be >= 3, got {m}")
    with workprec(100):
        pi2 = mpmath.pi() ** 2
        return float(mpf(m) * (m + 1) / 4 - 16 * m / pi2**2 * mpmath.exp(-mpf(alpha) * pi2))


def critical_step_count(m: int, alpha: float) -> int:
    """n = round(m^3 log m / pi^2) + alpha m^3, the critical-window schedule."""
    return round(m**3 * math.log(m) / math.pi**2 + alpha * m**3)


def predict(m: int, n: int) -> RegimeEstimate:
    """Classify (m, n) into a regime and evaluate the matching limit law.

    Thresholds carry factor-of-10 buffers around each law's validity
    region; the regimes are only separated asymptotically, so the
    crossovers here are engineering choices (reported in the estimate).
    The prediction is clamped into the rigorous sandwich bounds.
    """
    if m < 3:
        raise ValueError(f"predict requires m >= 3 (bounds domain), got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")

    log_m = math.log(m)
    n_critical = m**3 * log_m / math.pi**2
    kappa: float | None

    if n < m / 10:
        regime, normalizer = "sublinear", "n"
        kappa = None
        predicted = float(n)
    elif n <= 10 * m:
        regime, normalizer = "linear", "n"
        kappa = n / m
        predicted = n * f_kappa(kappa)
    elif n < m**3 / (10 * max(1.0, log_m)) :
        regime, normalizer = "intermediate", "sqrt(m*n)"
        kappa = None
        predicted = math.sqrt(2 * m * n / math.pi)
    elif abs(n - n_critical) <= 5 * m**3:
        regime, normalizer = "critical_log", "m"
        kappa = (n - n_critical) / m**3  # alpha
        predicted = critical_estimate(m, kappa)
    elif n <= 10 * m**3:
        regime, normalizer = "cubic", "m^2"
        kappa = n / m**3
        predicted = m**2 * g_kappa(kappa)
    else:
        regime, normalizer = "supercubic", "m^2"
        kappa = None
        predicted = m * (m + 1) / 4

    pair = bounds(m, n)
    lower, upper = float(pair.lower), float(pair.upper)
    clamped = False
    if predicted < lower:
        predicted, clamped = lower, True
    elif predicted > upper:
        predicted, clamped = upper, True
    return RegimeEstimate(regime=regime, predicted=predicted, normalizer=normalizer,
                          kappa=kappa, clamped=clamped, lower=lower, upper=upper)


def consistency_limits(tol: float = 1e-10) -> dict:
    """Check sqrt(k) f(k) (k -> inf) and g(k)/sqrt(k) (k -> 0+) against sqrt(2/pi)."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    target = math.sqrt(2 / math.pi)
    f_points = [10.0, 50.0, 100.0]
    g_points = [1e-2, 1e-3, 1e-4]
    f_values = [math.sqrt(k) * f_kappa(k, method="quadrature", tol=tol) for k in f_points]
    g_values = [g_kappa(k, tol=tol) / math.sqrt(k) for k in g_points]
    f_dev = [abs(v - target) for v in f_values]
    g_dev = [abs(v - target) for v in g_values]
    return {
        "target": target,
        "f_kappas": f_points,
        "f_values": f_values,
        "f_deviations": f_dev,
        "f_monotone": all(a > b for a, b in zip(f_dev, f_dev[1:])),
        "g_kappas": g_points,
        "g_values": g_values,
        "g_deviations": g_dev,
        "g_monotone": all(a > b for a, b in zip(g_dev, g_dev[1:])),
    }
