from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equidist.buck import (ArithProg, Covering, SetWindow, asymptotic_density_estimate,
                           measurability_gap, mu_upper_bound, verify_cover)
from equidist.errors import OutOfWindowError, SpecParseError, StrategyUnavailableError


def exhaustive_min_cover(members, M, budget):
    """Every subset of {r+(m) : m <= M} with cost <= budget, no bounding.

    Returns (min cost, lexicographically least optimal covering as (m, r) pairs).
    """
    members = [int(n) for n in members]
    full = (1 << len(members)) - 1
    cands = []
    for m in range(1, M + 1):
        for r in range(m):
            mask = sum(1 << i for i, n in enumerate(members) if n % m == r)
            cands.append((Fraction(1, m), mask, (m, r)))
    best = [None, None]

    def walk(i, covered, cost, chosen):
        if covered == full:
            key = tuple(sorted(chosen))
            if best[0] is None or cost < best[0] or (cost == best[0] and key < best[1]):
                best[0], best[1] = cost, key
            return
        if i == len(cands):
            return
        w, mask, tag = cands[i]
        if cost + w <= budget:
            walk(i + 1, covered | mask, cost + w, chosen + [tag])
        walk(i + 1, covered, cost, chosen)

    walk(0, 0, Fraction(0), [])
    return best[0], best[1]


def pairs(cover):
    return tuple((p.m, p.r) for p in cover.progressions)


# -- windows ----------------------------------------------------------------

def test_set_window_sources(tmp_path):
    A = SetWindow.from_expression("(2) | 1+(4)", 20)
    assert A.members.tolist() == [1, 2, 4, 5, 6, 8, 9, 10, 12, 13, 14, 16, 17, 18, 20]
    assert SetWindow.builtin("evens", 10).members.tolist() == [2, 4, 6, 8, 10]
    assert SetWindow.builtin("primes", 30).members.tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert SetWindow.builtin("squarefree", 12).members.tolist() == [1, 2, 3, 5, 6, 7, 10, 11]
    f = tmp_path / "set.txt"
    f.write_text("3\n# comment\n9\n\n27\n")
    assert SetWindow.from_file(f, 30).members.tolist() == [3, 9, 27]
    f.write_text("3\nnine\n")
    with pytest.raises(SpecParseError) as err:
        SetWindow.from_file(f)
    assert err.value.line == 2
    with pytest.raises(SpecParseError):
        SetWindow.from_expression("2+[3]", 10)


def test_density_examples():
    t = asymptotic_density_estimate(SetWindow.builtin("all", 500), [1, 10, 500])
    assert t.statistics == [1, 1, 1]
    assert asymptotic_density_estimate(SetWindow.builtin("evens", 10), [10]).statistics == [0.5]
    A = SetWindow.from_expression("2+(3)", 10 ** 4)
    d = asymptotic_density_estimate(A, [10 ** 4]).statistics[0]
    assert d == sum(1 for n in range(1, 10 ** 4 + 1) if n % 3 == 2) / 10 ** 4
    assert abs(d - 1 / 3) <= 1e-4
    with pytest.raises(OutOfWindowError):
        asymptotic_density_estimate(A, [10 ** 4 + 1])


def test_verify_cover_examples():
    evens = SetWindow.builtin("evens", 100)
    assert verify_cover(Covering((ArithProg(0, 1),)), evens)
    assert not verify_cover(Covering((ArithProg(1, 2),)), evens)
    A = SetWindow.from_expression("(2) | 1+(4)", 1000)
    assert verify_cover(Covering((ArithProg(0, 2), ArithProg(1, 4))), A)
    assert not verify_cover(Covering((ArithProg(0, 2),)), A)


def test_cost_is_exact():
    c = Covering((ArithProg(0, 3), ArithProg(1, 7), ArithProg(2, 11)))
    assert c.cost == Fraction(1, 3) + Fraction(1, 7) + Fraction(1, 11)
    assert isinstance(c.cost, Fraction)


# -- covering optima --------------------------------------------------------

def test_mu_examples():
    assert mu_upper_bound(SetWindow.builtin("all", 100), 1, "exact") == (1, Covering((ArithProg(0, 1),)))
    A = SetWindow.from_expression("0+(3)", 10 ** 4)
    cost, cover = mu_upper_bound(A, 6, "exact")
    assert (cost, pairs(cover)) == exhaustive_min_cover(A.members, 6, Fraction(1, 3))
    assert cost == Fraction(1, 3)
    A = SetWindow.from_expression("(2) | 1+(4)", 10 ** 4)
    cost, cover = mu_upper_bound(A, 8, "exact")
    assert (cost, pairs(cover)) == exhaustive_min_cover(A.members, 8, Fraction(3, 4))
    assert pairs(cover) == ((2, 0), (4, 1))


def test_empty_set_costs_nothing():
    cost, cover = mu_upper_bound(SetWindow.builtin("all", 10).complement(), 3)
    assert cost == 0 and cover.progressions == ()


@pytest.mark.parametrize("m", range(1, 7))
def test_single_progression_density(m):
    for r in range(m):
        A = SetWindow.from_expression(f"{r}+({m})", 10 ** 4)
        cost, cover = mu_upper_bound(A, 12, "exact")
        assert cost == Fraction(1, m)
        assert verify_cover(cover, A)


def test_measurability_gap_examples():
    assert measurability_gap(SetWindow.from_expression("0+(2)", 10 ** 4), 4) == 0
    assert measurability_gap(SetWindow.builtin("all", 10 ** 4), 1) == 0
    assert measurability_gap(SetWindow.from_expression("0+(3) | 1+(3)", 10 ** 4), 6) == 0


def test_primes_gap_positive():
    # the primes have Buck density 0, but no bounded-modulus cover sees that
    assert measurability_gap(SetWindow.builtin("primes", 2000), 6) > 0


def test_exact_refuses_large_bound():
    with pytest.raises(StrategyUnavailableError):
        mu_upper_bound(SetWindow.builtin("evens", 100), 40, "exact")
    cost, cover = mu_upper_bound(SetWindow.builtin("evens", 100), 40, "greedy")
    assert verify_cover(cover, SetWindow.builtin("evens", 100))


def test_greedy_prunes_redundant_picks():
    A = SetWindow.from_expression("(2) | 1+(4)", 10 ** 4)
    cost, cover = mu_upper_bound(A, 8, "greedy")
    assert verify_cover(cover, A)
    for p in cover.progressions:
        assert not verify_cover(Covering(tuple(q for q in cover.progressions if q != p)), A)


window_sets = st.lists(st.tuples(st.integers(1, 6), st.integers(0, 5)), min_size=1, max_size=3).map(
    lambda terms: " | ".join(f"{r % m}+({m})" for m, r in terms))


@settings(max_examples=25)
@given(window_sets, st.integers(2, 5))
def test_exact_matches_exhaustive_oracle(expr, M):
    A = SetWindow.from_expression(expr, 120)
    g_cost, _ = mu_upper_bound(A, M, "greedy")
    cost, cover = mu_upper_bound(A, M, "exact")
    assert (cost, pairs(cover)) == exhaustive_min_cover(A.members, M, g_cost)
    assert cost <= g_cost
    assert verify_cover(cover, A)


@settings(max_examples=25)
@given(st.lists(st.integers(1, 200), min_size=1, max_size=40))
def test_exact_on_arbitrary_sets(members):
    A = SetWindow.from_members(members, 200)
    g_cost, g_cover = mu_upper_bound(A, 4, "greedy")
    cost, cover = mu_upper_bound(A, 4, "exact")
    assert verify_cover(cover, A) and verify_cover(g_cover, A)
    assert (cost, pairs(cover)) == exhaustive_min_cover(A.members, 4, g_cost)


@settings(max_examples=20)
@given(window_sets)
def test_monotone_in_modulus_bound(expr):
    A = SetWindow.from_expression(expr, 600)
    costs = [mu_upper_bound(A, M, "exact")[0] for M in range(1, 9)]
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    assert costs[-1] >= Fraction(len(A), A.horizon) - Fraction(8, A.horizon)
