from __future__ import annotations

from itertools import chain, combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finloc.errors import HorizonMismatch, InvalidInstance, NoDominatingSet, TooFewElements
from finloc.finsets import BlockFamily, IntervalPartition, WSet
from finloc.relations import (
    FiniteRelationInstance,
    QuantifierReport,
    b_fin,
    d_fin,
    duality_values,
    eval_R_exists_k,
    eval_R_forall_k,
    eval_S_k,
    eval_S_plus,
    eval_S_plus_eps,
    eval_S_plus_phi,
    s_plus_profile,
)

FIVE_FOURS = IntervalPartition((0, 4, 8, 12, 16, 20)).to_family()
FOUR_THREES = IntervalPartition((0, 3, 6, 9, 12)).to_family()
THIRDS = WSet.of(range(0, 20, 3), 20)


# brute-force oracles straight from the definitions -------------------------------


def oracle_rich(X: set[int], ys: list[int], horizon: int, c: int = 2) -> list[bool]:
    out = []
    for j in range(len(ys) - 1):
        if ys[j + 1] > horizon:
            break
        out.append(len([x for x in X if ys[j] <= x < ys[j + 1]]) >= c)
    return out


def oracle_S_k(X: set[int], ys: list[int], horizon: int, k: int, c: int = 2) -> set[int]:
    rich = oracle_rich(X, ys, horizon, c)
    return {n for n in range(len(rich)) if n + k <= len(rich) and all(rich[n + i] for i in range(k))}


def powerset(items):
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def oracle_d(inst: FiniteRelationInstance) -> int:
    n, m = len(inst.left), len(inst.right)
    sizes = [len(D) for D in powerset(range(m)) if all(any(inst.holds[i][j] for j in D) for i in range(n))]
    return min(sizes)


def oracle_b(inst: FiniteRelationInstance) -> int:
    n, m = len(inst.left), len(inst.right)
    sizes = [len(B) for B in powerset(range(n)) if all(any(not inst.holds[i][j] for i in B) for j in range(m))]
    return min(sizes)


# quantifier reports ----------------------------------------------------------------


def test_report_tail_and_count():
    r = QuantifierReport.from_verdicts([True, False, True, True])
    assert r.witnesses == (0, 2, 3)
    assert r.evaluated_up_to == 3
    assert r.tail_holds_from == 2
    assert r.holds_almost_always() and r.holds_infinitely_often(3)
    assert not r.holds_infinitely_often(4)
    assert QuantifierReport.from_verdicts([True, False]).tail_holds_from is None


def test_R_forall_k_examples():
    evens = WSet.of(range(0, 20, 2), 20)
    r = eval_R_forall_k(evens, FIVE_FOURS, 2)
    assert r.witnesses == (0, 1, 2, 3, 4) and r.tail_holds_from == 0
    empty = eval_R_forall_k(WSet(20, ()), FIVE_FOURS, 0)
    assert empty.witnesses == (0, 1, 2, 3, 4) and empty.tail_holds_from == 0
    full = eval_R_forall_k(WSet.interval(0, 20), FIVE_FOURS, 2)
    assert full.witnesses == () and full.tail_holds_from is None


def test_R_exists_k_examples():
    odds = WSet.of(range(1, 12, 2), 12)
    assert eval_R_exists_k(odds, FOUR_THREES, 1).witnesses == (0, 2)
    assert eval_R_exists_k(WSet(12, ()), FOUR_THREES, 1).witnesses == (0, 1, 2, 3)
    assert eval_R_exists_k(WSet.interval(0, 12), FOUR_THREES, 0).witnesses == ()


def test_R_k_rejects_blocks_past_the_horizon():
    with pytest.raises(HorizonMismatch):
        eval_R_forall_k(WSet(10, ()), FIVE_FOURS, 1)


def test_S_k_examples():
    assert eval_S_k(WSet.interval(0, 20), WSet.of(range(0, 20, 3)), 2).witnesses == (0, 1, 2, 3, 4)
    assert eval_S_k(WSet(20, ()), THIRDS, 2).witnesses == ()
    assert eval_S_k(WSet.of({0, 1, 4, 5}, 7), WSet.of({0, 2, 4, 6}), 1).witnesses == (0, 2)


def test_S_k_needs_enough_points_of_Y():
    with pytest.raises(TooFewElements):
        eval_S_k(WSet.interval(0, 20), WSet.of({0, 3}), 2)


def test_S_plus_examples():
    X = WSet.interval(0, 20)
    # 7 points of Y give 6 gaps, all holding 3 points
    assert eval_S_plus(X, WSet.of(range(0, 20, 3)), 5).start == 0
    lonely = WSet.of({0, 1}, 20)
    assert eval_S_plus(lonely, THIRDS, 2).start is None
    for Xs in (X, lonely, WSet.of({4, 5, 10, 11}, 20)):
        assert eval_S_plus(Xs, THIRDS, 1).holds == bool(eval_S_k(Xs, THIRDS, 1).witnesses)


def test_S_plus_profile_sweeps_m():
    prof = s_plus_profile(WSet.interval(0, 20), THIRDS, 10)
    assert prof == {m: 0 for m in range(1, 7)}


def test_S_plus_eps_examples():
    X = WSet.interval(0, 60)
    Y = WSet.of(range(0, 60, 3))  # 19 full gaps: n <= 3 is evaluable
    r = eval_S_plus_eps(X, Y)
    assert set(r.witnesses) >= {0, 1, 2}
    assert eval_S_plus_eps(WSet(60, ()), Y).witnesses == ()
    # n = 0 looks at gap 1 alone
    only_gap1 = WSet.of({3, 4}, 60)
    assert eval_S_plus_eps(only_gap1, Y).witnesses == (0,)


def test_S_plus_phi_examples():
    X = WSet.interval(0, 60)
    Y = WSet.of(range(0, 60, 3))
    phi = [n + 1 for n in range(20)]
    r = eval_S_plus_phi(X, Y, phi)
    assert r.witnesses == tuple(range(r.evaluated_up_to + 1)) and r.evaluated_up_to >= 0
    assert eval_S_plus_phi(WSet(60, ()), Y, phi).witnesses == ()
    with pytest.raises(InvalidInstance):
        eval_S_plus_phi(X, Y, [2, 2, 2])


@settings(max_examples=150, deadline=None)
@given(
    st.sets(st.integers(0, 79), max_size=60),
    st.sets(st.integers(0, 79), min_size=6, max_size=25),
    st.integers(1, 4),
    st.integers(2, 4),
)
def test_S_k_matches_brute_force(xs, ys, k, c):
    X, Y = WSet.of(xs, 80), WSet.of(ys, 80)
    ys_sorted = sorted(ys)
    if len(ys_sorted) < k + 1:
        return
    assert set(eval_S_k(X, Y, k, c).witnesses) == oracle_S_k(xs, ys_sorted, 80, k, c)
    # chain monotonicity and threshold monotonicity
    if len(ys_sorted) >= k + 2:
        assert set(eval_S_k(X, Y, k + 1).witnesses) <= set(eval_S_k(X, Y, k).witnesses)
    assert set(eval_S_k(X, Y, k, c + 1).witnesses) <= set(eval_S_k(X, Y, k, c).witnesses)


# finite b and d ------------------------------------------------------------------------


def test_d_fin_examples():
    leq = FiniteRelationInstance.from_predicate(range(3), range(3), lambda x, y: x <= y)
    got = d_fin(leq)
    assert got.size == 1 and got.members == (2,)
    eq = FiniteRelationInstance.from_predicate(range(2), range(2), lambda x, y: x == y)
    assert d_fin(eq).size == 2 and set(d_fin(eq).members) == {0, 1}
    full = FiniteRelationInstance.from_predicate(range(3), range(3), lambda x, y: True)
    assert d_fin(full).size == 1


def test_b_fin_examples():
    eq = FiniteRelationInstance.from_predicate(range(2), range(2), lambda x, y: x == y)
    assert b_fin(eq).size == 2
    empty = FiniteRelationInstance.from_predicate(range(3), range(3), lambda x, y: False)
    assert b_fin(empty).size == 1


def test_no_dominating_set():
    empty = FiniteRelationInstance.from_predicate(range(2), range(2), lambda x, y: False)
    with pytest.raises(NoDominatingSet):
        d_fin(empty)
    full = FiniteRelationInstance.from_predicate(range(2), range(2), lambda x, y: True)
    with pytest.raises(NoDominatingSet):
        b_fin(full)


def test_table_must_be_total():
    with pytest.raises(InvalidInstance):
        FiniteRelationInstance((0, 1), (0,), ((True,),))


def test_duality_on_every_small_relation():
    checked = 0
    for a, b in ((2, 2), (2, 3), (3, 2), (3, 3)):
        for bits in product((False, True), repeat=a * b):
            table = tuple(tuple(bits[i * b : (i + 1) * b]) for i in range(a))
            inst = FiniteRelationInstance(tuple(range(a)), tuple(range(b)), table)
            if not inst.satisfies_dom_rng():
                continue
            v = duality_values(inst)
            assert v["d"] == v["b_dual"] == oracle_d(inst)
            assert v["b"] == v["d_dual"] == oracle_b(inst)
            checked += 1
    assert checked > 100


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_d_and_b_match_brute_force(a, b, data):
    bits = data.draw(st.lists(st.booleans(), min_size=a * b, max_size=a * b))
    inst = FiniteRelationInstance(
        tuple(range(a)), tuple(range(b)), tuple(tuple(bits[i * b : (i + 1) * b]) for i in range(a))
    )
    if inst.satisfies_dom_rng():
        assert d_fin(inst).size == oracle_d(inst)
        assert b_fin(inst).size == oracle_b(inst)


def test_complement_inverse_is_an_involution():
    inst = FiniteRelationInstance.from_predicate(range(3), "abc", lambda x, y: (x + ord(y)) % 2 == 0)
    assert inst.complement_inverse().complement_inverse() == inst
    assert FiniteRelationInstance.from_json(inst.to_json()) == inst


def test_families_and_sets_must_share_window():
    F = BlockFamily.of([{0, 1}], 2)
    assert eval_R_exists_k(WSet.of({0}, 2), F, 0).witnesses == ()
