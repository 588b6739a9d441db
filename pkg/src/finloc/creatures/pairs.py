"""Conditions ``(u, 𝒦)``: a finite set and finitely many families of disjoint pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

from ..errors import InvalidInstance

Pair = frozenset[int]
Family = frozenset[Pair]


@dataclass(frozen=True)
class PairCondition:
    u: frozenset[int]
    KK: frozenset[Family]

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", frozenset(self.u))
        fams = []
        for F in self.KK:
            F = frozenset(frozenset(K) for K in F)
            seen: set[int] = set()
            for K in F:
                if len(K) != 2:
                    raise InvalidInstance(f"family member {sorted(K)} is not a 2-element set")
                if seen & K:
                    raise InvalidInstance("pairs inside a family must be disjoint")
                seen |= K
            fams.append(F)
        object.__setattr__(self, "KK", frozenset(fams))

    @classmethod
    def of(cls, u: Iterable[int], families: Iterable[Iterable[Iterable[int]]]) -> "PairCondition":
        return cls(frozenset(u), frozenset(frozenset(frozenset(K) for K in F) for F in families))

    def to_json(self) -> dict[str, Any]:
        return {
            "u": sorted(self.u),
            "KK": sorted(sorted(sorted(K) for K in F) for F in self.KK),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "PairCondition":
        return cls.of(data["u"], data["KK"])


def pair_leq(p0: PairCondition, p1: PairCondition) -> bool:
    """``p1`` extends ``p0``: ``u`` only grows above ``max u_0``, families are kept,
    and no old pair is newly swallowed by ``u``."""
    top = max(p0.u, default=-1)
    if frozenset(x for x in p1.u if x <= top) != p0.u:
        return False
    if not p0.KK <= p1.KK:
        return False
    for F in p0.KK:
        for K in F:
            if K <= p1.u and not K <= p0.u:
                return False
    return True


def join(p0: PairCondition, p1: PairCondition) -> PairCondition:
    """Common extension of two conditions with the same ``u``."""
    if p0.u != p1.u:
        raise InvalidInstance("only conditions with the same finite part have this join")
    return PairCondition(p0.u, p0.KK | p1.KK)
