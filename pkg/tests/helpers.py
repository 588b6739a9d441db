"""Small hand-built creatures shared by the creature tests."""

from __future__ import annotations

from finloc.creatures import Creature, LogNorm, make_creature


def fan(k: int, leaves: list[int], lo: int | None = None, hi: int | None = None) -> Creature:
    """A root over leaves at the given points, log-normed."""
    L = {(): leaves[0] if lo is None else lo}
    R = {(): leaves[-1] if hi is None else hi}
    for i, x in enumerate(leaves):
        L[(i,)] = R[(i,)] = x
    return make_creature(k, L, R, {(): LogNorm(frozenset(range(len(leaves))))})


def ksplit_of_fans(k: int, groups: list[list[int]]) -> Creature:
    """A ``k``-splitting root whose successors are log-normed fans."""
    L = {(): groups[0][0]}
    R = {(): groups[-1][-1]}
    norms = {}
    for i, g in enumerate(groups):
        L[(i,)] = g[0]
        R[(i,)] = g[-1]
        norms[(i,)] = LogNorm(frozenset(range(len(g))))
        for j, x in enumerate(g):
            L[(i, j)] = R[(i, j)] = x
    return make_creature(k, L, R, norms)
