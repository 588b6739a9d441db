from __future__ import annotations

from bisect import bisect_left

import pytest

from finloc.creatures import (
    ConditionFragment,
    contribution,
    fragment_leq,
    refines,
    shrink_condition,
    shrink_contract,
    shrink_creature,
    shrink_creature_traced,
    weight,
)
from finloc.creatures.shrink import first_full_run, gap_fill
from finloc.errors import SparsityViolation, WeightTooSmall, WindowTooShort
from finloc.finsets import WSet
from finloc.generate import gen_heavy_creature, random_B


def scan_sparse(points, B, k) -> bool:
    """Every k+1 consecutive gaps of B include one holding fewer than 2 points."""
    pts = sorted(set(points))
    fills = [bisect_left(pts, b) - bisect_left(pts, a) for a, b in zip(B, B[1:])]
    return all(any(fills[n + i] < 2 for i in range(k + 1)) for n in range(len(fills) - k))


def test_gap_helpers():
    assert gap_fill([1, 2, 5, 6, 7], [0, 4, 8]) == [2, 3]
    assert first_full_run([1, 2, 5, 6], [0, 4, 8, 9], 2) == 0
    assert first_full_run([1, 2, 5, 6], [0, 4, 8, 9], 3) is None
    assert first_full_run([1, 2, 5, 6, 10, 11], [0, 4, 8, 12], 1, start_after=5) == 2


def test_contribution_in_one_gap_loses_little(rng):
    t = gen_heavy_creature(rng, 2, 15)
    lo, hi = t.span()
    B = [lo, hi + 1, hi + 3]
    t2 = shrink_creature(t, B)
    assert refines(t, t2)
    assert weight(t2) >= weight(t) - 3
    assert scan_sparse(contribution(t2), B, 2)


def test_every_other_point_of_a_wide_fan(rng):
    t = gen_heavy_creature(rng, 2, 15, max_gap=0)
    cont = sorted(contribution(t))
    B = cont[::2] + [cont[-1] + 1, cont[-1] + 2]
    t2 = shrink_creature(t, B)
    assert refines(t, t2)
    assert weight(t2) >= 1 and weight(t2) >= weight(t) - 14
    assert scan_sparse(contribution(t2), B, 2)
    assert shrink_contract(t, t2, B)


def test_random_heavy_creatures_meet_the_contract(rng):
    for i in range(6):
        k = 2 + i % 2
        shape = "k-root" if i % 3 == 2 else "wide-root"
        t = gen_heavy_creature(rng, k, 15, shape=shape)
        lo, hi = t.span()
        B = random_B(rng, lo, hi + 1)
        t2, trace = shrink_creature_traced(t, B)
        assert trace.steps
        assert refines(t, t2)
        assert weight(t2) >= weight(t) - 14
        assert scan_sparse(contribution(t2), list(B.elements), k)
        assert shrink_contract(t, t2, B)


def test_contract_checker_detects_violations(rng):
    t = gen_heavy_creature(rng, 2, 15, max_gap=0)
    cont = sorted(contribution(t))
    B = cont[::2] + [cont[-1] + 1, cont[-1] + 2]
    c = shrink_contract(t, t, B)  # the unshrunk creature fills every gap
    assert not c and not c.sparse and c.violation == 0


def test_preconditions(rng):
    t14 = gen_heavy_creature(rng, 2, 14)
    lo, hi = t14.span()
    with pytest.raises(WeightTooSmall):
        shrink_creature(t14, [lo, hi + 1, hi + 2])
    t15 = gen_heavy_creature(rng, 2, 15)
    lo, hi = t15.span()
    with pytest.raises(WindowTooShort):
        shrink_creature(t15, [lo, hi + 1])


def test_shrink_single_creature_fragment(rng):
    t = gen_heavy_creature(rng, 2, 16, start=5)
    lo, hi = t.span()
    B = random_B(rng, 0, hi + 1)
    p = ConditionFragment(frozenset({1, 3}), (t,))
    out = shrink_condition(p, B)
    assert out.sparse and out.selector_check == "full-contribution"
    assert fragment_leq(p, out.fragment, depth_cap=1)


def test_shrink_fragment_selectors_exhaustively(rng):
    # tiny creatures with the weight guard lowered keep the selector space enumerable
    from helpers import fan

    a, b = fan(2, [4, 5, 6, 7]), fan(2, [20, 21, 22, 23])
    B = WSet.of([0, 2, 3, 8, 10, 12, 14, 16, 24, 26], 27)
    out = shrink_condition(ConditionFragment(frozenset({1}), (a, b)), B, min_weight=0)
    assert out.selector_check == "exhaustive" and out.sparse


def test_shrink_fragment_two_heavy_creatures(rng):
    a = gen_heavy_creature(rng, 2, 16, start=0)
    b = gen_heavy_creature(rng, 2, 16, start=a.span()[1] + 10)
    B = random_B(rng, 0, b.span()[1] + 1, density=0.3)
    pts = sorted(set(B.elements) | {a.span()[1] + 2, a.span()[1] + 4, a.span()[1] + 6})
    out = shrink_condition(ConditionFragment(frozenset(), (a, b)), WSet.of(pts, B.horizon))
    assert out.sparse


def test_fragment_needs_B_between_creatures(rng):
    from helpers import fan

    a, b = fan(2, [4, 5, 6, 7]), fan(2, [20, 21, 22, 23])
    with pytest.raises(SparsityViolation):
        shrink_condition(ConditionFragment(frozenset(), (a, b)), [0, 10, 24, 26], min_weight=0)
    with pytest.raises(WeightTooSmall):
        shrink_condition(ConditionFragment(frozenset(), (a, b)), [0, 10, 24, 26])
