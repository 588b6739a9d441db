from __future__ import annotations

import pytest

from finloc.creatures import PairCondition, join, pair_leq
from finloc.errors import InvalidInstance
from finloc.generate import gen_pair_condition


def base() -> PairCondition:
    return PairCondition.of({0, 2}, [[{4, 5}, {6, 7}]])


def test_reflexive():
    assert pair_leq(base(), base())


def test_new_pair_swallowed_by_u():
    grown = PairCondition.of({0, 2, 4, 5}, [[{4, 5}, {6, 7}]])
    assert not pair_leq(base(), grown)
    half = PairCondition.of({0, 2, 4}, [[{4, 5}, {6, 7}]])
    assert pair_leq(base(), half)


def test_families_grow_with_u_fixed():
    more = PairCondition.of({0, 2}, [[{4, 5}, {6, 7}], [{8, 9}]])
    assert pair_leq(base(), more)
    assert not pair_leq(more, base())


def test_u_only_grows_above_its_maximum():
    assert not pair_leq(base(), PairCondition.of({0, 1, 2}, [[{4, 5}, {6, 7}]]))
    assert not pair_leq(base(), PairCondition.of({0}, [[{4, 5}, {6, 7}]]))


def test_validation_and_json():
    with pytest.raises(InvalidInstance):
        PairCondition.of(set(), [[{1, 2, 3}]])
    with pytest.raises(InvalidInstance):
        PairCondition.of(set(), [[{1, 2}, {2, 3}]])
    assert PairCondition.from_json(base().to_json()) == base()


def test_join_is_a_common_extension(rng):
    for _ in range(200):
        a = gen_pair_condition(rng)
        b = PairCondition(a.u, gen_pair_condition(rng).KK)
        j = join(a, b)
        assert pair_leq(a, j) and pair_leq(b, j)
    with pytest.raises(InvalidInstance):
        join(base(), PairCondition.of({1}, []))


def test_transitive_on_random_chains(rng):
    from finloc.suites import _extend_pair

    for _ in range(200):
        p = gen_pair_condition(rng)
        q = _extend_pair(rng, p)
        r = _extend_pair(rng, q)
        assert pair_leq(p, q) and pair_leq(q, r) and pair_leq(p, r)
