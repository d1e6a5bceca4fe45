"""Closed-form evaluators for the expected inversion number I_{m,n}.

Three algebraically equal spectral sums, an exact binomial
formula, the two-sided sandwich bounds, and the lazified (aperiodic)
expectation.  The spectral sums run at a configurable binary precision
with internal guard bits: the summands span a ~m^4 dynamic range and the
result suffers heavy cancellation for small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf, workprec

from .budget import check_budget
from .chain import iterate_totals
from .spectral import MIN_PRECISION, SpectralTable, build_table

VARIANTS = ("theorem1", "ser2", "ser3")

# Materialize the (m+1)^2 eigenvalue table only below this entry count.
MATERIALIZE_LIMIT = 2**24


@dataclass(frozen=True)
class ClosedFormOptions:
    variant: str = "theorem1"
    precision: int = MIN_PRECISION
    materialize_x: bool = True
    use_symmetry: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.precision < MIN_PRECISION:
            raise ValueError(f"precision must be >= {MIN_PRECISION}, got {self.precision}")


@dataclass(frozen=True)
class ClosedFormResult:
    value: object  # mpf at the requested precision
    m: int
    n: int
    variant: str
    precision: int
    saturated: bool


@dataclass(frozen=True)
class BoundsPair:
    lower: object
    upper: object


def _limit_value(m: int):
    return mpf(m) * (m + 1) / 4


def exact_fraction(value) -> Fraction:
    """The exact rational represented by a binary float or mpf.

    Comparisons against exact DP values must not round the float side
    again (a 53-bit detour can flip a 1e-16 margin), so bounds and
    closed-form outputs are compared through this.
    """
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    p, q = mpmath.libmp.to_rational(value._mpf_)
    return Fraction(p, q)


def _saturated(m: int, n: int, table: SpectralTable, precision: int) -> bool:
    # x_00^n below relative 2^-(precision+64): the whole sum is invisible
    # next to m(m+1)/4 at working precision.  Only valid for m >= 3, where
    # every certified |x_jk| < 1; for m <= 2 an eigenvalue -1 persists.
    if n == 0 or m < 3:
        return False
    x00 = 1 - mpf(4) / m * (1 - table.c[0] ** 2)
    if x00 <= 0:
        return False
    return n * mpmath.log(x00) < -(precision + 64) * mpmath.log(2)


def closed_form_info(m: int, n: int, opts: ClosedFormOptions | None = None) -> ClosedFormResult:
    """I_{m,n} by the spectral double sum, with saturation metadata.

    The j <-> m-j, k <-> m-k symmetry makes mirrored summands bit-equal
    (the table mirrors c exactly), so with ``use_symmetry`` each orbit's
    term is computed once and reused; the addition order is unchanged and
    the result is bit-identical to the plain double loop.
    """
    if opts is None:
        opts = ClosedFormOptions()
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    precision = opts.precision
    guard = 32 + (2 * (m + 1) ** 2).bit_length()
    work = precision + guard
    table = build_table(m, work)
    with workprec(work):
        limit = _limit_value(m)
        if _saturated(m, n, table, precision):
            with workprec(precision):
                return ClosedFormResult(+limit, m, n, opts.variant, precision, True)

        c = table.c
        inv_s2 = [1 / sk**2 for sk in table.s]
        inv_omc = [1 / (1 - cj) for cj in c]
        four_over_m = mpf(4) / m

        materialize = opts.materialize_x and (m + 1) ** 2 <= MATERIALIZE_LIMIT
        if materialize:
            xpow = {}
            for j in range(m + 1):
                for k in range(j, m + 1):
                    xpow[(j, k)] = (1 - four_over_m * (1 - c[j] * c[k])) ** n
            x_at = lambda j, k: xpow[(j, k) if j <= k else (k, j)]
        else:
            x_at = lambda j, k: (1 - four_over_m * (1 - c[j] * c[k])) ** n

        def summand(j, k):
            if opts.variant == "theorem1":
                weight = (c[j] + c[k]) ** 2 * inv_s2[j] * inv_s2[k]
                return weight * x_at(j, k)
            weight = (c[j] + c[k]) * inv_omc[j] * inv_omc[k]
            if opts.variant == "ser2":
                return weight * x_at(j, k)
            return weight * (1 - x_at(j, k))  # ser3

        def orbit_of(j, k):
            # Summands are symmetric in (j, k) always, and additionally under
            # the exact mirror (j, k) -> (m-j, m-k) for the theorem1 weights.
            rep = (j, k) if j <= k else (k, j)
            if opts.variant == "theorem1":
                mj, mk = m - rep[0], m - rep[1]
                mirrored = (mj, mk) if mj <= mk else (mk, mj)
                rep = min(rep, mirrored)
            return rep

        cache: dict = {}
        total = mpf(0)
        for j in range(m + 1):
            for k in range(m + 1):
                orbit = orbit_of(j, k)
                if opts.use_symmetry:
                    term = cache.get(orbit)
                    if term is None:
                        term = summand(*orbit)
                        cache[orbit] = term
                else:
                    term = summand(*orbit)
                total += term

        scale = 1 / (8 * mpf(m + 1) ** 2)
        if opts.variant == "ser3":
            value = scale * total
        else:
            value = limit - scale * total
        with workprec(precision):
            value = +value
    return ClosedFormResult(value, m, n, opts.variant, precision, False)


def closed_form(m: int, n: int, opts: ClosedFormOptions | None = None):
    """I_{m,n} by the spectral double sum (value only)."""
    return closed_form_info(m, n, opts).value


def _g_coefficient(s: int, m: int) -> int:
    half = (s + 1) // 2  # ceil(s/2)
    top = 2 * half - 1
    total = 0
    for l in range(m + 1):
        k = 0
        while True:
            idx = half + l + k * (m + 1)
            if idx > top:
                break
            total += (-1) ** k * (m - 2 * l) * math.comb(top, idx)
            k += 1
    return total


def _h_coefficient(s: int, m: int) -> int:
    half = s // 2  # floor(s/2)
    top = 2 * half
    total = 0
    j = -(half // (m + 1)) - 1
    while True:
        idx = half + j * (m + 1)
        if idx > top:
            break
        if idx >= 0:
            total += (1 - 2 * (j & 1)) * math.comb(top, idx)
        j += 1
    return total


def eriksen(m: int, n: int) -> Fraction:
    """Exact binomial expression for I_{m,n}.

    The unbounded inner sums are finitely supported: binomials with upper
    index outside [0, top] vanish, which fixes the truncation ranges.
    """
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    check_budget(n * n * (n // max(m, 1) + m + 1), f"eriksen m={m}, n={n}")
    gh = {}
    for s in range(1, n + 1):
        gh[s] = _g_coefficient(s, m) * _h_coefficient(s, m)
    total = Fraction(0)
    for r in range(1, n + 1):
        inner = 0
        for s in range(1, r + 1):
            inner += math.comb(r - 1, s - 1) * (-4) ** (r - s) * gh[s]
        total += Fraction(math.comb(n, r) * inner, m**r)
    return total


def bounds(m: int, n: int, precision: int = 128) -> BoundsPair:
    """Two-sided sandwich for I_{m,n}; requires m >= 3."""
    if m < 3:
        raise ValueError(f"bounds require m >= 3, got {m}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    with workprec(precision + 32):
        alpha0 = mpmath.pi() / (2 * m + 2)
        c0, s0 = mpmath.cos(alpha0), mpmath.sin(alpha0)
        x00 = 1 - mpf(4) / m * (1 - c0**2)
        xn = x00**n
        limit = _limit_value(m)
        lower = limit * (1 - xn)
        upper = limit - c0**2 / (2 * mpf(m + 1) ** 2 * s0**4) * xn
        with workprec(precision):
            return BoundsPair(lower=+lower, upper=+upper)


def aperiodic_expected(m: int, n: int, p: Fraction | None = None) -> Fraction:
    """Expected inversions for the lazy chain: binomial mix of the I_{m,k}.

    Default hold parameter p = m/(m+1) gives the standard aperiodic variant.
    Exact when fed the exact DP values (always the case here).
    """
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    if p is None:
        p = Fraction(m, m + 1)
    p = Fraction(p)
    if not (0 < p <= 1):
        raise ValueError(f"p must lie in (0, 1], got {p}")
    q = 1 - p
    total = Fraction(0)
    for k, value in enumerate(iterate_totals(m, n)):
        total += math.comb(n, k) * p**k * q ** (n - k) * value
    return total
