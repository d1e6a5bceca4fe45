from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from invwalk import chain
from invwalk.budget import WorkBudgetError


def test_cell_index_is_dense():
    for m in (1, 2, 5):
        cells = chain._triangle_cells(m)
        assert [chain.cell_index(m, i, j) for i, j in cells] == list(range(len(cells)))
        assert len(cells) == m * (m + 1) // 2


def test_neighbors_stay_in_triangle():
    for m in (1, 2, 3, 6):
        for i, j in chain._triangle_cells(m):
            for k, l in chain.neighbors(m, i, j):
                assert 0 <= k <= l < m
                assert abs(k - i) + abs(l - j) == 1


def test_initial_state():
    state = chain.InversionState.initial(3)
    assert state.total() == 0
    assert state.denominator == 1


def test_single_step_m2():
    state = chain.dp_step(chain.InversionState.initial(2))
    assert state.probabilities() == {
        (0, 0): Fraction(1, 2), (0, 1): Fraction(0), (1, 1): Fraction(1, 2),
    }
    assert state.total() == 1


@pytest.mark.parametrize("m,n,expected", [
    (1, 0, 0), (1, 1, 1), (1, 5, 1), (1, 6, 0),
    (2, 1, 1), (2, 3, Fraction(3, 2)),
])
def test_dp_examples(m, n, expected):
    assert chain.expected_inversions_dp(m, n) == expected


@pytest.mark.parametrize("m,n", [(1, 6), (2, 6), (3, 5)])
def test_dp_equals_brute_force(m, n):
    for steps in range(n + 1):
        assert chain.expected_inversions_dp(m, steps) == \
            chain.brute_force_expected(m, steps)


def test_symmetry_holds_along_trajectory():
    state = chain.InversionState.initial(4)
    for _ in range(12):
        state = chain.dp_step(state)
        assert chain.symmetry_check(state)


def test_probabilities_bounded():
    state = chain.InversionState.initial(3)
    for _ in range(20):
        state = chain.dp_step(state)
        for p in state.probabilities().values():
            assert 0 <= p <= 1


@pytest.mark.parametrize("m", [8, 9, 10])
def test_totals_monotone_nondecreasing(m):
    values = list(chain.iterate_totals(m, 200))
    assert all(a <= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("m", [3, 4, 5])
def test_totals_approach_limit_from_below(m):
    limit = Fraction(m * (m + 1), 4)
    value = chain.expected_inversions_dp(m, 2000)
    assert value < limit
    assert float(limit - value) < 1e-10


@pytest.mark.parametrize("m,n", [(2, 10), (3, 15), (5, 30), (8, 25)])
def test_float_dp_tracks_exact(m, n):
    exact = float(chain.expected_inversions_dp(m, n))
    approx = chain.expected_inversions_float(m, n)
    assert approx == pytest.approx(exact, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(m=st.integers(min_value=1, max_value=6),
       n=st.integers(min_value=0, max_value=40))
def test_dp_total_in_range(m, n):
    value = chain.expected_inversions_dp(m, n)
    assert 0 <= value <= Fraction(m * (m + 1), 2)
    # Denominator always divides m^n.
    assert (value * m**n).denominator == 1


@pytest.mark.parametrize("m,N", [(1, 6), (2, 6), (3, 5)])
def test_functional_equation_residual_is_zero(m, N):
    assert chain.functional_equation_residual(m, N) == 0


def test_budget_refusal():
    with pytest.raises(WorkBudgetError):
        chain.brute_force_expected(3, 50)


def test_domain_errors():
    with pytest.raises(ValueError):
        chain.expected_inversions_dp(0, 1)
    with pytest.raises(ValueError):
        chain.expected_inversions_float(2, -1)
