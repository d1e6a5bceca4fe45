"""Spectral constants of the adjacent-transposition chain on S_{m+1}.

The chain's closed forms are built from the angles a_k = (2k+1)*pi/(2m+2)
and the derived quantities c_k = cos(a_k), s_k = sin(a_k) and
x_{jk} = 1 - (4/m)(1 - c_j c_k).  Pairs with j + k != m are certified
eigenvalues of the transition matrix; the x_{jk} formula is defined for
all pairs regardless.

A ``SpectralTable`` is immutable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import mpmath
from mpmath import mpf, workprec

MIN_PRECISION = 53

# Names and exact integer values of the trigonometric identities checked by
# verify_identities, as functions of m.  The first three are single sums,
# the rest are (m+1)^2 double sums.
IDENTITY_NAMES = (
    "sum 1/(1-c_j) = (m+1)^2",
    "sum c_j/(1-c_j) = m(m+1)",
    "half-range sum c_k^2/s_k^2 = m(m+1)/2",
    "sum (c_j+c_k)^2/(s_j^2 s_k^2) = 2m(m+1)^3",
    "sum (c_j+c_k)(1-c_j c_k)/((1-c_j)(1-c_k)) = 2m(m+1)^2",
    "sum (1-c_j c_k)^2/((1-c_j)(1-c_k)) = (2m+1)(m+1)^2",
    "sum (c_j+c_k)/((1-c_j)(1-c_k)) = 2m(m+1)^3",
)


@dataclass(frozen=True)
class SpectralTable:
    """Precomputed c_k, s_k arrays for a given m at a given binary precision."""

    m: int
    precision: int
    alphas: tuple = field(repr=False)
    c: tuple = field(repr=False)
    s: tuple = field(repr=False)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    computed: float
    exact: Fraction
    residual: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class IdentityReport:
    m: int
    precision: int
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def max_residual(self) -> float:
        return max(check.residual for check in self.checks)


def build_table(m: int, precision: int = MIN_PRECISION) -> SpectralTable:
    """Populate the c_k / s_k table for the chain on S_{m+1}.

    The upper half of the arrays is mirrored from the lower half so that
    c[m-k] == -c[k] and s[m-k] == s[k] hold exactly at working precision
    (not merely up to rounding); downstream symmetry-halving relies on this.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")

    alphas = [None] * (m + 1)
    c = [None] * (m + 1)
    s = [None] * (m + 1)
    with workprec(precision):
        pi = mpmath.pi()
        for k in range(m + 1):
            alphas[k] = (2 * k + 1) * pi / (2 * m + 2)
        # Angles are computed per index (no recurrence) so errors stay O(ulp).
        for k in range(m // 2 + 1):
            mirror = m - k
            if mirror == k:
                # alpha = pi/2 exactly.
                c[k] = mpf(0)
                s[k] = mpf(1)
            else:
                c[k] = mpmath.cos(alphas[k])
                s[k] = mpmath.sin(alphas[k])
                c[mirror] = -c[k]
                s[mirror] = s[k]
    return SpectralTable(m=m, precision=precision, alphas=tuple(alphas), c=tuple(c), s=tuple(s))


def eigenvalue(table: SpectralTable, j: int, k: int):
    """x_{jk} = 1 - (4/m)(1 - c_j c_k).

    Defined for every index pair; only pairs with j + k != m are certified
    eigenvalues of the transition matrix (see ``is_certified_eigenvalue``).
    """
    m = table.m
    if not (0 <= j <= m and 0 <= k <= m):
        raise ValueError(f"indices must lie in [0, {m}], got ({j}, {k})")
    with workprec(table.precision):
        return 1 - mpf(4) / m * (1 - table.c[j] * table.c[k])


def is_certified_eigenvalue(table: SpectralTable, j: int, k: int) -> bool:
    """Whether x_{jk} is a certified eigenvalue (equivalently c_j + c_k != 0)."""
    m = table.m
    if not (0 <= j <= m and 0 <= k <= m):
        raise ValueError(f"indices must lie in [0, {m}], got ({j}, {k})")
    return j + k != m


def _identity_values(m: int) -> tuple:
    return (
        Fraction((m + 1) ** 2),
        Fraction(m * (m + 1)),
        Fraction(m * (m + 1), 2),
        Fraction(2 * m * (m + 1) ** 3),
        Fraction(2 * m * (m + 1) ** 2),
        Fraction((2 * m + 1) * (m + 1) ** 2),
        Fraction(2 * m * (m + 1) ** 3),
    )


def _identity_sums_direct(m: int, c, s):
    """Literal evaluation of the seven sums (quadratic work for the last four)."""
    one = mpf(1)
    s1 = mpmath.fsum(one / (1 - cj) for cj in c)
    s2 = mpmath.fsum(cj / (1 - cj) for cj in c)
    s3 = mpmath.fsum((c[k] / s[k]) ** 2 for k in range((m - 1) // 2 + 1))
    s4 = mpmath.fsum(
        (c[j] + c[k]) ** 2 / (s[j] ** 2 * s[k] ** 2)
        for j in range(m + 1)
        for k in range(m + 1)
    )
    s5 = mpmath.fsum(
        (c[j] + c[k]) * (1 - c[j] * c[k]) / ((1 - c[j]) * (1 - c[k]))
        for j in range(m + 1)
        for k in range(m + 1)
    )
    s6 = mpmath.fsum(
        (1 - c[j] * c[k]) ** 2 / ((1 - c[j]) * (1 - c[k]))
        for j in range(m + 1)
        for k in range(m + 1)
    )
    s7 = mpmath.fsum(
        (c[j] + c[k]) / ((1 - c[j]) * (1 - c[k]))
        for j in range(m + 1)
        for k in range(m + 1)
    )
    return s1, s2, s3, s4, s5, s6, s7


def _identity_sums_factored(m: int, c, s):
    """Same seven sums, with the double sums expanded into products of
    single sums (exact algebra on the summands, linear work)."""
    one = mpf(1)
    inv_s2 = [one / sk**2 for sk in s]
    c2_s2 = [ck**2 * i for ck, i in zip(c, inv_s2)]
    c_s2 = [ck * i for ck, i in zip(c, inv_s2)]
    inv_omc = [one / (1 - ck) for ck in c]
    c_omc = [ck * i for ck, i in zip(c, inv_omc)]
    c2_omc = [ck**2 * i for ck, i in zip(c, inv_omc)]

    Sb = mpmath.fsum(inv_s2)
    Sa = mpmath.fsum(c2_s2)
    Sc = mpmath.fsum(c_s2)
    Se = mpmath.fsum(inv_omc)
    Sg = mpmath.fsum(c_omc)
    Sh = mpmath.fsum(c2_omc)

    s1 = Se
    s2 = Sg
    s3 = mpmath.fsum((c[k] / s[k]) ** 2 for k in range((m - 1) // 2 + 1))
    # (c_j+c_k)^2 = c_j^2 + 2 c_j c_k + c_k^2
    s4 = 2 * Sa * Sb + 2 * Sc**2
    # (c_j+c_k)(1 - c_j c_k) = c_j + c_k - c_j^2 c_k - c_j c_k^2
    s5 = 2 * Sg * Se - 2 * Sg * Sh
    # (1 - c_j c_k)^2 = 1 - 2 c_j c_k + c_j^2 c_k^2
    s6 = Se**2 - 2 * Sg**2 + Sh**2
    s7 = 2 * Sg * Se
    return s1, s2, s3, s4, s5, s6, s7


def verify_identities(
    table: SpectralTable,
    tol: float | None = None,
    direct: bool | None = None,
) -> IdentityReport:
    """Check the seven trigonometric identities behind the closed forms.

    Sums are evaluated with guard bits beyond the table precision (the
    identities' exact values are integers or half-integers, so with a
    correctly rounded evaluation the residual at table precision is at
    ulp scale).  ``direct`` forces the literal double sums; by default the
    quadratic evaluation is used up to m = 63 and the exact factored
    restructuring beyond that.

    Default tolerance is (m+1)^3 * 2**(-precision+7).
    """
    m, precision = table.m, table.precision
    if tol is None:
        tol = (m + 1) ** 3 * 2.0 ** (-precision + 7)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if direct is None:
        direct = m <= 63

    guard = 40 + max(0, (2 * (m + 1) ** 2).bit_length())
    with workprec(precision + guard):
        pi = mpmath.pi()
        angles = [(2 * k + 1) * pi / (2 * m + 2) for k in range(m + 1)]
        c = [mpmath.cos(a) for a in angles]
        s = [mpmath.sin(a) for a in angles]
        if direct:
            sums = _identity_sums_direct(m, c, s)
        else:
            sums = _identity_sums_factored(m, c, s)
        exacts = _identity_values(m)
        checks = []
        for name, computed, exact in zip(IDENTITY_NAMES, sums, exacts):
            with workprec(precision):
                rounded = +computed
                residual = abs(rounded - mpf(exact.numerator) / exact.denominator)
            checks.append(
                IdentityCheck(
                    name=name,
                    computed=float(rounded),
                    exact=exact,
                    residual=float(residual),
                    tolerance=float(tol),
                    passed=residual < tol,
                )
            )
    return IdentityReport(m=m, precision=precision, checks=tuple(checks))


def transition_matrix(m: int):
    """Full (m+1)! x (m+1)! transition matrix of the chain, as exact Fractions.

    Desk-scale only (m <= 5 or so); used for spectral certification.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    states = list(permutations(range(m + 1)))
    index = {p: i for i, p in enumerate(states)}
    size = len(states)
    step = Fraction(1, m)
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for i, p in enumerate(states):
        for g in range(m):
            q = list(p)
            q[g], q[g + 1] = q[g + 1], q[g]
            matrix[i][index[tuple(q)]] += step
    return matrix


def _det_high_precision(matrix, shift):
    """det(matrix - shift*Id) by Gaussian elimination with partial pivoting
    at the ambient mpmath precision."""
    size = len(matrix)
    a = [[mpf(e.numerator) / e.denominator - (shift if i == j else 0)
          for j, e in enumerate(row)] for i, row in enumerate(matrix)]
    det = mpf(1)
    for col in range(size):
        pivot_row = max(range(col, size), key=lambda r: abs(a[r][col]))
        if a[pivot_row][col] == 0:
            return mpf(0)
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            det = -det
        pivot = a[col][col]
        det *= pivot
        for r in range(col + 1, size):
            factor = a[r][col] / pivot
            if factor == 0:
                continue
            for cc in range(col, size):
                a[r][cc] -= factor * a[col][cc]
    return det


def certify_spectrum(m: int, tol: float = 1e-8, precision: int = 256) -> dict:
    """Desk-scale check that every x_{jk} with j+k != m is an eigenvalue.

    Builds the full (m+1)! transition matrix and evaluates its characteristic
    polynomial at each candidate at high precision.  Returns per-pair
    |det(P - x Id)| values and an overall pass flag.
    """
    table = build_table(m, precision)
    matrix = transition_matrix(m)
    residuals = {}
    with workprec(precision):
        for j in range(m + 1):
            for k in range(j, m + 1):
                if j + k == m:
                    continue
                x = eigenvalue(table, j, k)
                residuals[(j, k)] = float(abs(_det_high_precision(matrix, x)))
    return {
        "m": m,
        "residuals": residuals,
        "tolerance": tol,
        "passed": all(r < tol for r in residuals.values()),
    }
