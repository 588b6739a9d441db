"""Slaloms and k-trees as localization devices for functions ω → ω."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .errors import InvalidInstance, LengthMismatch, SlalomOverflow


@dataclass(frozen=True)
class Slalom:
    """Cell ``n`` is a set of exactly ``n + 1`` naturals."""

    cells: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        cells = tuple(frozenset(c) for c in self.cells)
        for n, c in enumerate(cells):
            if len(c) != n + 1:
                raise InvalidInstance(f"slalom cell {n} has {len(c)} members, expected {n + 1}")
        object.__setattr__(self, "cells", cells)

    @property
    def length(self) -> int:
        return len(self.cells)

    def to_json(self) -> dict[str, Any]:
        return {"cells": [sorted(c) for c in self.cells]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Slalom":
        return cls(tuple(frozenset(int(x) for x in c) for c in data["cells"]))


@dataclass(frozen=True)
class KTree:
    """A finite prefix-closed tree in which every node has at most ``k`` successors."""

    k: int
    nodes: frozenset[tuple[int, ...]]

    def __post_init__(self) -> None:
        if self.k < 2:
            raise InvalidInstance(f"k-trees need k >= 2, got {self.k}")
        nodes = frozenset(tuple(s) for s in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        succ: dict[tuple[int, ...], int] = {}
        for s in nodes:
            if s and s[:-1] not in nodes:
                raise InvalidInstance(f"tree is not prefix-closed at {s}")
            if s:
                succ[s[:-1]] = succ.get(s[:-1], 0) + 1
        for s, n in succ.items():
            if n > self.k:
                raise InvalidInstance(f"node {s} has {n} > k={self.k} successors")

    @classmethod
    def of(cls, k: int, branches: Iterable[Sequence[int]]) -> "KTree":
        """The smallest tree containing every prefix of every given branch."""
        nodes: set[tuple[int, ...]] = {()}
        for b in branches:
            b = tuple(b)
            nodes.update(b[:i] for i in range(len(b) + 1))
        return cls(k, frozenset(nodes))

    def level_labels(self, n: int) -> set[int]:
        """Values taken at position ``n`` by nodes of length ``n + 1``."""
        return {s[n] for s in self.nodes if len(s) == n + 1}

    def maximal_nodes(self) -> list[tuple[int, ...]]:
        parents = {s[:-1] for s in self.nodes if s}
        return sorted(s for s in self.nodes if s not in parents)

    def to_json(self) -> dict[str, Any]:
        return {"k": self.k, "nodes": [list(s) for s in sorted(self.nodes, key=lambda s: (len(s), s))]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "KTree":
        return cls(int(data["k"]), frozenset(tuple(int(x) for x in s) for s in data["nodes"]))


def slalom_localizes(f: Sequence[int], S: Slalom) -> bool:
    """Whether ``f(n) ∈ S(n)`` for every ``n`` in the prefix ``f``."""
    if len(f) > S.length:
        raise LengthMismatch(f"prefix of length {len(f)} exceeds slalom length {S.length}")
    return all(v in S.cells[n] for n, v in enumerate(f))


def ktree_localizes(f: Sequence[int], T: KTree) -> bool:
    f = tuple(f)
    return all(f[:i] in T.nodes for i in range(len(f) + 1))


def ktree_to_slalom_cover(T: KTree, depth: int) -> Slalom:
    """A slalom of length ``depth`` trapping every branch prefix of ``T``.

    Cell ``n`` holds the labels used by ``T`` at level ``n``, padded with the
    smallest unused naturals up to exactly ``n + 1`` members.  A level with
    more than ``n + 1`` distinct labels cannot be covered and is reported.
    """
    cells = []
    for n in range(depth):
        labels = T.level_labels(n)
        if len(labels) > n + 1:
            raise SlalomOverflow(
                f"level {n} of the tree uses {len(labels)} labels but a slalom cell holds {n + 1}"
            )
        cell = set(labels)
        fresh = 0
        while len(cell) < n + 1:
            if fresh not in cell:
                cell.add(fresh)
            fresh += 1
        cells.append(frozenset(cell))
    return Slalom(tuple(cells))
