from __future__ import annotations

import numpy as np
import pytest

from finloc.creatures.creature import Creature, validate_creature, weight
from finloc.creatures.derivation import ConditionFragment
from finloc.creatures.ops import refines
from finloc.creatures.pairs import PairCondition
from finloc.errors import InvalidInstance
from finloc.finsets import BlockFamily, WSet, in_P_k
from finloc.generate import (
    gen_blockfamily,
    gen_creature,
    gen_heavy_creature,
    gen_instance,
    gen_pair_condition,
    gen_wset,
    random_B,
    random_refinement,
)
from finloc.relations import FiniteRelationInstance


def test_gen_creature_k2_depth2_is_valid(rng):
    for _ in range(50):
        data = gen_instance("creature", rng, k=2, depth=2)
        t = Creature.from_json(data)
        validate_creature(t)
        assert t.k == 2


def test_gen_covering_blockfamily_min_size_3_is_in_P_2(rng):
    for _ in range(50):
        F = BlockFamily.from_json(gen_instance("blockfamily", rng, window=60, covering=True, min_size=3))
        assert F.covering
        assert all(len(b) >= 3 for b in F.blocks)
        assert in_P_k(F, 2)


def test_gen_wset_of_size_zero_is_empty(rng):
    X = WSet.from_json(gen_instance("wset", rng, window=30, size=0))
    assert len(X) == 0
    assert X.horizon == 30


def test_gen_wset_exact_size_and_overfull_request(rng):
    X = gen_wset(rng, 20, size=7)
    assert len(X) == 7 and all(0 <= x < 20 for x in X.elements)
    with pytest.raises(InvalidInstance):
        gen_wset(rng, 5, size=6)


def test_blockfamily_window_too_small(rng):
    with pytest.raises(InvalidInstance):
        gen_blockfamily(rng, 2, min_size=3)


def test_non_covering_family_keeps_some_blocks(rng):
    for _ in range(30):
        F = gen_blockfamily(rng, 40, covering=False, min_size=2)
        assert not F.covering and len(F.blocks) >= 1


def test_every_instance_kind_round_trips(rng):
    parsers = {
        "wset": WSet.from_json,
        "blockfamily": BlockFamily.from_json,
        "creature": Creature.from_json,
        "fragment": ConditionFragment.from_json,
        "relinstance": FiniteRelationInstance.from_json,
    }
    for kind, parse in parsers.items():
        data = gen_instance(kind, rng, window=40)
        assert parse(data).to_json() == data


def test_relinstance_has_full_domain_and_range(rng):
    for _ in range(30):
        inst = FiniteRelationInstance.from_json(gen_instance("relinstance", rng))
        assert inst.satisfies_dom_rng()


def test_unknown_kind_is_rejected(rng):
    with pytest.raises(InvalidInstance):
        gen_instance("hypergraph", rng)


def test_same_seed_same_instances():
    a = [gen_instance("creature", np.random.default_rng(5), k=3, depth=2) for _ in range(3)]
    b = [gen_instance("creature", np.random.default_rng(5), k=3, depth=2) for _ in range(3)]
    assert a == b


@pytest.mark.parametrize("shape", ["wide-root", "k-root"])
def test_heavy_creature_has_requested_weight(rng, shape):
    t = gen_heavy_creature(rng, 2, 15, shape)
    validate_creature(t, check_norms=False)
    assert weight(t) == 15


def test_heavy_creature_unknown_shape(rng):
    with pytest.raises(InvalidInstance):
        gen_heavy_creature(rng, 2, 15, "star")


def test_random_B_has_two_points_past_the_range(rng):
    B = random_B(rng, 0, 50)
    assert sum(1 for b in B.elements if b > 50) == 2


def test_random_refinement_refines(rng):
    for _ in range(40):
        t = gen_creature(rng, 2, 2)
        t1 = random_refinement(rng, t)
        validate_creature(t1)
        assert refines(t, t1)


def test_pair_condition_generator_is_valid(rng):
    for _ in range(30):
        p = gen_pair_condition(rng)
        assert PairCondition.from_json(p.to_json()) == p
