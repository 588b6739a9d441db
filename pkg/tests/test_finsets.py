from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from finloc.errors import InvalidInstance, TooFewElements, WindowTooShort
from finloc.finsets import BlockFamily, IntervalPartition, WSet, gap_counts, in_P_k, intervals_of, mu


def test_mu_enumerates_in_increasing_order():
    assert mu(WSet.of({3, 5, 9}), 1) == 5
    assert mu(WSet.interval(0, 20), 0) == 0
    assert mu(WSet.of({2, 4, 8, 16}), 3) == 16


def test_mu_past_the_window_is_a_truncation_signal():
    with pytest.raises(WindowTooShort):
        mu(WSet.of({3, 5, 9}), 3)
    with pytest.raises(InvalidInstance):
        mu(WSet.of({3}), -1)


def test_in_P_k():
    assert in_P_k(BlockFamily.of([{0, 1}, {2, 3}]), 1)
    assert not in_P_k(BlockFamily.of([{0}, {1, 2}]), 1)
    assert in_P_k(BlockFamily.of([{0, 1, 2}, {3, 4, 5}]), 2)


def test_intervals_of():
    assert intervals_of(WSet.of({0, 3, 6})).blocks == (frozenset(range(0, 3)), frozenset(range(3, 6)))
    assert intervals_of(WSet.of({1, 2})).blocks == (frozenset({1}),)
    assert [sorted(b) for b in intervals_of(WSet.of({0, 5, 7, 10}))] == [
        list(range(0, 5)),
        [5, 6],
        [7, 8, 9],
    ]


def test_intervals_of_needs_two_points():
    with pytest.raises(TooFewElements):
        intervals_of(WSet.of({4}))


def test_wset_validation():
    with pytest.raises(InvalidInstance):
        WSet(5, (1, 1))
    with pytest.raises(InvalidInstance):
        WSet(5, (3, 5))
    with pytest.raises(InvalidInstance):
        WSet(0, ())
    assert len(WSet(5, ())) == 0


def test_blockfamily_validation_and_ordering():
    F = BlockFamily.of([{4, 5}, {0, 1}])
    assert F.blocks[0] == frozenset({0, 1})
    with pytest.raises(InvalidInstance):
        BlockFamily.of([{0, 1}, {1, 2}])
    with pytest.raises(InvalidInstance):
        BlockFamily.of([set()])
    with pytest.raises(InvalidInstance):
        BlockFamily.of([{0, 1}, {3}], covering=True)
    with pytest.raises(InvalidInstance):
        BlockFamily(3, (frozenset({5}),))


def test_interval_partition():
    P = IntervalPartition((0, 3, 12))
    assert len(P) == 2
    assert list(P.block(1)) == list(range(3, 12))
    assert P.to_family().covering
    with pytest.raises(InvalidInstance):
        IntervalPartition((1, 3))
    with pytest.raises(InvalidInstance):
        IntervalPartition((0, 3, 3))


def test_json_round_trip():
    X = WSet.of({1, 4, 7}, horizon=10)
    assert WSet.from_json(X.to_json()) == X
    F = BlockFamily.of([{0, 1}, {2, 3, 4}], covering=True)
    assert BlockFamily.from_json(F.to_json()) == F
    assert F.to_json() == {"horizon": 5, "covering": True, "blocks": [[0, 1], [2, 3, 4]]}


def test_gap_counts():
    assert gap_counts(WSet.of({0, 1, 4, 5}, 7), WSet.of({0, 2, 4, 6})) == [2, 0, 2]


sets = st.sets(st.integers(0, 60), min_size=2, max_size=30)


@given(sets)
def test_mu_strictly_increasing(els):
    X = WSet.of(els, 61)
    values = [mu(X, n) for n in range(len(X))]
    assert values == sorted(set(values))


@given(sets)
def test_intervals_cover_contiguously(els):
    X = WSet.of(els, 61)
    F = intervals_of(X)
    ordered = sorted(x for b in F for x in b)
    assert ordered == list(range(X.elements[0], X.elements[-1]))
    for n, b in enumerate(F):
        assert mu(X, n) in b and mu(X, n + 1) not in b


@given(st.lists(st.integers(1, 5), min_size=1, max_size=10))
def test_covering_family_is_an_interval(sizes):
    cuts = [0]
    for s in sizes:
        cuts.append(cuts[-1] + s)
    F = IntervalPartition(tuple(cuts)).to_family()
    assert sorted(x for b in F for x in b) == list(range(cuts[-1]))
