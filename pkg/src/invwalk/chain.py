"""Exact triangular DP for the inversion probabilities of the chain.

State: the probabilities p_{i,j} (0 <= i <= j < m) that positions i and
j+1 are inverted after n uniform adjacent transpositions.  One step mixes
each cell with its grid neighbours inside the triangle and injects mass on
the diagonal.  All denominators divide m^n, so the state is stored as a
single big-integer numerator array over the implied denominator m^n; this
keeps the arithmetic exact with no gcd work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .budget import check_budget


def _triangle_cells(m: int):
    return [(i, j) for j in range(m) for i in range(j + 1)]


def cell_index(m: int, i: int, j: int) -> int:
    """Position of cell (i, j) in the row-major triangular layout."""
    return j * (j + 1) // 2 + i


def neighbors(m: int, i: int, j: int):
    """Grid neighbours of (i, j) inside the triangle 0 <= i <= j < m."""
    out = []
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        k, l = i + di, j + dj
        if 0 <= k <= l < m:
            out.append((k, l))
    return out


@dataclass(frozen=True)
class InversionState:
    """Exact inversion probabilities after n steps for the chain on S_{m+1}.

    ``numerators[cell_index(m, i, j)] / m**n`` is p_{i,j}^{(n)}.
    """

    m: int
    n: int
    numerators: tuple

    @classmethod
    def initial(cls, m: int) -> "InversionState":
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        return cls(m=m, n=0, numerators=(0,) * (m * (m + 1) // 2))

    @property
    def denominator(self) -> int:
        return self.m**self.n

    def probability(self, i: int, j: int) -> Fraction:
        if not (0 <= i <= j < self.m):
            raise ValueError(f"cell ({i}, {j}) outside triangle for m={self.m}")
        return Fraction(self.numerators[cell_index(self.m, i, j)], self.denominator)

    def probabilities(self) -> dict:
        den = self.denominator
        return {
            (i, j): Fraction(self.numerators[cell_index(self.m, i, j)], den)
            for i, j in _triangle_cells(self.m)
        }

    def total(self) -> Fraction:
        """I_{m,n} = sum of all cell probabilities."""
        return Fraction(sum(self.numerators), self.denominator)


def dp_step(state: InversionState) -> InversionState:
    """One exact chain step: p' = p + (1/m) sum_nbrs (p_k - p) + (delta/m)(1 - 2p)."""
    m, n = state.m, state.n
    old = state.numerators
    den = m**n
    new = []
    for i, j in _triangle_cells(m):
        q = old[cell_index(m, i, j)]
        acc = m * q
        for k, l in neighbors(m, i, j):
            acc += old[cell_index(m, k, l)] - q
        if i == j:
            acc += den - 2 * q
        new.append(acc)
    return InversionState(m=m, n=n + 1, numerators=tuple(new))


def symmetry_check(state: InversionState) -> bool:
    """p_{i,j} == p_{m-j-1, m-i-1} exactly (conjugation by the reversal)."""
    m = state.m
    nums = state.numerators
    return all(
        nums[cell_index(m, i, j)] == nums[cell_index(m, m - j - 1, m - i - 1)]
        for i, j in _triangle_cells(m)
    )


def iterate_totals(m: int, n: int):
    """Yield I_{m,k} as exact Fractions for k = 0..n (single DP sweep)."""
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    check_budget(n * m * (m + 1) // 2, f"exact DP m={m}, n={n}")
    state = InversionState.initial(m)
    yield state.total()
    for _ in range(n):
        state = dp_step(state)
        yield state.total()


def expected_inversions_dp(m: int, n: int) -> Fraction:
    """I_{m,n} as an exact rational via the triangular DP."""
    for k, value in enumerate(iterate_totals(m, n)):
        if k == n:
            return value
    raise AssertionError("unreachable")


def expected_inversions_float(m: int, n: int) -> float:
    """Float64 fast path of the same recursion (approximate, for sweeps)."""
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    check_budget(n * m * (m + 1) // 2, f"float DP m={m}, n={n}")
    p = np.zeros((m, m))
    tri = np.triu(np.ones((m, m), dtype=bool))
    # Per-cell neighbour count inside the triangle.
    deg = np.zeros((m, m))
    nbr_shifts = []
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        ok = np.zeros((m, m), dtype=bool)
        for i in range(m):
            for j in range(i, m):
                k, l = i + di, j + dj
                ok[i, j] = 0 <= k <= l < m
        deg += ok
        nbr_shifts.append(((di, dj), ok))
    diag = np.eye(m, dtype=bool)
    inv_m = 1.0 / m
    for _ in range(n):
        acc = -deg * p
        for (di, dj), ok in nbr_shifts:
            if not ok.any():
                continue
            # shifted[i, j] = p[i+di, j+dj] where the neighbour is valid
            shifted = np.zeros((m, m))
            rdst = slice(max(0, -di), m - max(0, di))
            rsrc = slice(max(0, di), m - max(0, -di))
            cdst = slice(max(0, -dj), m - max(0, dj))
            csrc = slice(max(0, dj), m - max(0, -dj))
            shifted[rdst, cdst] = p[rsrc, csrc]
            acc += np.where(ok, shifted, 0.0)
        updated = p + inv_m * acc
        updated[diag] += inv_m * (1.0 - 2.0 * p[diag])
        p = updated
        p[~tri] = 0.0
    return float(p[tri].sum())


def brute_force_expected(m: int, n: int) -> Fraction:
    """Average inversion count over all m^n generator sequences (oracle)."""
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    check_budget(m**n * max(n, 1), f"brute force m={m}, n={n}")
    total = 0
    count = 0
    for seq in product(range(m), repeat=n):
        perm = list(range(m + 1))
        inv = 0
        for g in seq:
            if perm[g] < perm[g + 1]:
                inv += 1
            else:
                inv -= 1
            perm[g], perm[g + 1] = perm[g + 1], perm[g]
        total += inv
        count += 1
    return Fraction(total, count)


# --- functional-equation verification on truncated series -----------------


class _BivariateSeries:
    """Polynomial in (u, v) per power of t, truncated at t^N; exact rationals."""

    def __init__(self, order: int, coeffs=None):
        self.order = order
        self.coeffs = coeffs if coeffs is not None else [dict() for _ in range(order + 1)]

    @classmethod
    def from_states(cls, states, extract):
        series = cls(len(states) - 1)
        for r, state in enumerate(states):
            layer = series.coeffs[r]
            for (i, j), value in extract(state).items():
                if value:
                    layer[(i, j)] = layer.get((i, j), Fraction(0)) + value
        return series

    def scaled(self, factor: Fraction) -> "_BivariateSeries":
        out = _BivariateSeries(self.order)
        for r, layer in enumerate(self.coeffs):
            out.coeffs[r] = {k: factor * v for k, v in layer.items()}
        return out

    def times_uv_poly(self, poly: dict) -> "_BivariateSeries":
        """Multiply every t-layer by a fixed polynomial in (u, v)."""
        out = _BivariateSeries(self.order)
        for r, layer in enumerate(self.coeffs):
            dst = out.coeffs[r]
            for (i1, j1), v1 in layer.items():
                for (i2, j2), v2 in poly.items():
                    key = (i1 + i2, j1 + j2)
                    acc = dst.get(key, Fraction(0)) + v1 * v2
                    if acc:
                        dst[key] = acc
                    elif key in dst:
                        del dst[key]
        return out

    def times_t(self) -> "_BivariateSeries":
        out = _BivariateSeries(self.order)
        for r in range(1, self.order + 1):
            out.coeffs[r] = dict(self.coeffs[r - 1])
        return out

    def times_one_minus_t(self) -> "_BivariateSeries":
        shifted = self.times_t()
        return self.sub(shifted)

    def times_geom_t(self) -> "_BivariateSeries":
        """Multiply by 1/(1-t) mod t^{N+1} (prefix sums over t)."""
        out = _BivariateSeries(self.order)
        running: dict = {}
        for r in range(self.order + 1):
            for k, v in self.coeffs[r].items():
                acc = running.get(k, Fraction(0)) + v
                if acc:
                    running[k] = acc
                elif k in running:
                    del running[k]
            out.coeffs[r] = dict(running)
        return out

    def add(self, other: "_BivariateSeries") -> "_BivariateSeries":
        out = _BivariateSeries(self.order)
        for r in range(self.order + 1):
            layer = dict(self.coeffs[r])
            for k, v in other.coeffs[r].items():
                acc = layer.get(k, Fraction(0)) + v
                if acc:
                    layer[k] = acc
                elif k in layer:
                    del layer[k]
            out.coeffs[r] = layer
        return out

    def sub(self, other: "_BivariateSeries") -> "_BivariateSeries":
        return self.add(other.scaled(Fraction(-1)))

    def max_abs_coefficient(self) -> Fraction:
        best = Fraction(0)
        for layer in self.coeffs:
            for v in layer.values():
                if abs(v) > best:
                    best = abs(v)
        return best


def functional_equation_residual(m: int, N: int) -> Fraction:
    """Largest |coefficient| of LHS - RHS of the P(u, v) functional equation,
    after clearing the 1/u, 1/v poles by multiplying through by u*v and
    truncating at t^N.  Exact arithmetic; the contract is residual == 0.
    """
    if m < 1 or N < 1:
        raise ValueError(f"need m >= 1 and N >= 1, got m={m}, N={N}")
    check_budget((N + 1) * m * m * (m * m + 1), f"functional equation m={m}, N={N}")

    states = [InversionState.initial(m)]
    for _ in range(N):
        states.append(dp_step(states[-1]))

    def full(state):
        return {cell: p for cell, p in state.probabilities().items()}

    def left_border(state):
        return {(0, j): state.probability(0, j) for j in range(m)}

    def top_border(state):
        return {(i, 0): state.probability(i, m - 1) for i in range(m)}

    def diag_uv(state):
        # P_d(uv): coefficient of (uv)^i, encoded as monomial u^i v^i
        return {(i, i): state.probability(i, i) for i in range(m)}

    P = _BivariateSeries.from_states(states, full)
    Pl = _BivariateSeries.from_states(states, left_border)   # polynomial in v
    Pt = _BivariateSeries.from_states(states, top_border)    # polynomial in u
    Pduv = _BivariateSeries.from_states(states, diag_uv)

    inv_m = Fraction(1, m)

    # LHS * uv = uv (1-t) P + (t/m)(4uv - u^2 v - u - u v^2 - v) P
    kernel_uv = {(1, 1): Fraction(4), (2, 1): Fraction(-1), (1, 0): Fraction(-1),
                 (1, 2): Fraction(-1), (0, 1): Fraction(-1)}
    lhs = P.times_uv_poly({(1, 1): Fraction(1)}).times_one_minus_t()
    lhs = lhs.add(P.times_uv_poly(kernel_uv).times_t().scaled(inv_m))

    # RHS * uv, term by term (all times t/m):
    # uv * (1 + uv + ... + (uv)^{m-1}) / (1-t)
    geom_uv = {(i + 1, i + 1): Fraction(1) for i in range(m)}
    one = _BivariateSeries(N)
    one.coeffs[0] = {(0, 0): Fraction(1)}
    term1 = one.times_uv_poly(geom_uv).times_geom_t()
    # -(v - uv) P_l(v)
    term2 = Pl.times_uv_poly({(0, 1): Fraction(-1), (1, 1): Fraction(1)})
    # -(v-1) v^{m-1} uv P_t(u) = -(u v^{m+1} - u v^m) P_t(u)
    term3 = Pt.times_uv_poly({(1, m + 1): Fraction(-1), (1, m): Fraction(1)})
    # -(u^2 v + u) P_d(uv)
    term4 = Pduv.times_uv_poly({(2, 1): Fraction(-1), (1, 0): Fraction(-1)})

    rhs = term1.add(term2).add(term3).add(term4).times_t().scaled(inv_m)
    return lhs.sub(rhs).max_abs_coefficient()
