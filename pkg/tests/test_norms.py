from __future__ import annotations

import numpy as np
import pytest

from finloc.creatures.norms import (
    LogNorm,
    TableNorm,
    iter_subsets,
    norm_from_json,
    norms_agree,
    random_table_norm,
    restricts_to,
    validate_norm,
)
from finloc.errors import InvalidInstance, NormTableError


def oracle_nice(n) -> bool:
    """All four axioms by looping over every pair of subsets."""
    subsets = list(iter_subsets(n.base))
    if n(n.base) <= 0:
        return False
    if any(n({a}) > 1 for a in n.base):
        return False
    for C in subsets:
        for B in subsets:
            if B <= C:
                if n(B) > n(C):
                    return False
                if n(C) > 0 and n(B) < n(C) - 1 and n(C - B) < n(C) - 1:
                    return False
    return True


def log2_floor(A):
    return max(1, len(A)).bit_length() - 1


def test_log_norm_table_on_eight_points_is_nice():
    n = TableNorm.from_function(range(8), log2_floor)
    assert oracle_nice(n)
    assert validate_norm(n)


def test_cardinality_is_not_nice():
    n = TableNorm.from_function(range(4), len)
    v = validate_norm(n)
    assert not v and not oracle_nice(n)
    # singletons have value 1 and cardinality is monotone, so only bisection can fail
    assert v.axiom == "bisection"
    assert len(v.C) == 4 and len(v.B) == 2


def test_zero_norm_fails_positivity():
    v = validate_norm(TableNorm.from_function(range(3), lambda A: 0))
    assert not v and v.axiom == "positive-on-base"


def test_singletons_at_most_one():
    v = validate_norm(TableNorm.from_function(range(3), lambda A: 2 * len(A)))
    assert not v and v.axiom == "singleton-at-most-1"


def test_monotonicity_witness():
    def f(A):
        return 0 if A == frozenset({0, 1}) else min(1, len(A))

    v = validate_norm(TableNorm.from_function(range(3), f))
    assert not v and v.axiom == "monotone"
    assert v.B < v.C


def test_validator_agrees_with_brute_force(rng):
    for _ in range(200):
        size = int(rng.integers(1, 6))
        vals = rng.integers(0, 3, size=1 << size)
        n = TableNorm(frozenset(range(size)), tuple(int(v) for v in vals))
        assert bool(validate_norm(n)) == oracle_nice(n)


def test_validator_agrees_with_brute_force_on_monotone_tables(rng):
    # random monotone tables reach the bisection check far more often
    for _ in range(100):
        size = int(rng.integers(2, 6))
        vals = np.zeros(1 << size, dtype=int)
        for mask in range(1, 1 << size):
            below = max(vals[mask ^ (1 << i)] for i in range(size) if mask >> i & 1)
            vals[mask] = below + int(rng.random() < 0.4)
        n = TableNorm(frozenset(range(size)), tuple(int(v) for v in vals))
        assert bool(validate_norm(n)) == oracle_nice(n)


def test_large_base_uses_the_loop_path(rng):
    n = TableNorm.from_function(range(11), log2_floor)
    assert validate_norm(n)
    bad = TableNorm.from_function(range(11), lambda A: min(len(A), 1) + (len(A) >= 11) * 5)
    assert not validate_norm(bad)


def test_random_table_norms_are_nice(rng):
    for size in range(2, 9):
        assert oracle_nice(random_table_norm(range(size), rng)) if size <= 5 else validate_norm(
            random_table_norm(range(size), rng)
        )


def test_log_norm_scales():
    n = LogNorm(frozenset(range(2**15)))
    assert n.full() == 15
    assert n.lowered(7).full() == 8
    assert n.value_of_size(3) == 1
    assert validate_norm(n)
    assert not validate_norm(LogNorm(frozenset({0})))


def test_lowering_floors_at_zero():
    n = TableNorm.from_function(range(4), log2_floor).lowered(5)
    assert n.full() == 0 and n({0}) == 0


def test_restriction_and_agreement():
    big = TableNorm.from_function(range(6), log2_floor)
    small = big.restrict({1, 3, 5})
    assert small({1, 3}) == 1 and small.base == {1, 3, 5}
    assert restricts_to(big, small)
    assert not restricts_to(big, small.lowered(1))
    assert norms_agree(small, TableNorm.from_function({1, 3, 5}, log2_floor))
    log = LogNorm(frozenset(range(6)))
    assert norms_agree(log, big)
    assert restricts_to(log, log.restrict({0, 1}))
    with pytest.raises(InvalidInstance):
        big.restrict({9})


def test_table_validation():
    with pytest.raises(NormTableError):
        TableNorm(frozenset(range(2)), (0, 1, 1))
    with pytest.raises(NormTableError):
        TableNorm(frozenset(range(17)), ())
    with pytest.raises(NormTableError):
        TableNorm.from_table(range(2), {frozenset(): 0})
    with pytest.raises(InvalidInstance):
        TableNorm.from_function(range(2), len)({5})


def test_json_uses_labels_as_bit_positions():
    n = TableNorm.from_function({2, 5}, len)
    data = n.to_json()
    assert sorted(data["table"]) == [[0, 0], [4, 1], [32, 1], [36, 2]]
    assert norms_agree(norm_from_json(data, {2, 5}), n)
    assert norm_from_json({"kind": "log", "offset": 2}, range(8)).full() == 1
    with pytest.raises(NormTableError):
        norm_from_json({}, range(2))


def test_some_quarter_loses_at_most_two(rng):
    for _ in range(200):
        size = int(rng.integers(4, 9))
        n = random_table_norm(range(size), rng)
        colors = rng.integers(0, 4, size=size)
        quarters = [frozenset(i for i in range(size) if colors[i] == c) for c in range(4)]
        assert max(n(Q) for Q in quarters) >= n(n.base) - 2
