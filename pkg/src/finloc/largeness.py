"""(l, k)-largeness against finite families and its transfer lemmas."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Sequence

from .errors import Infeasible, InvalidInstance, TooFewElements
from .finsets import BlockFamily, WSet


@dataclass(frozen=True)
class FamilyUniverse:
    """A finite list of block families, each standing for one ground-model sequence."""

    families: tuple[BlockFamily, ...]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "families", tuple(self.families))

    def __len__(self) -> int:
        return len(self.families)

    def to_json(self) -> dict[str, Any]:
        return {"label": self.label, "families": [F.to_json() for F in self.families]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "FamilyUniverse":
        return cls(tuple(BlockFamily.from_json(f) for f in data["families"]), data.get("label", ""))


@dataclass(frozen=True)
class LargenessVerdict:
    large: bool
    family: int | None = None
    block: int | None = None
    meet: int | None = None

    def __bool__(self) -> bool:
        return self.large

    def to_json(self) -> dict[str, Any]:
        return {"large": self.large, "family": self.family, "block": self.block, "meet": self.meet}


def is_lk_large(X: WSet, U: FamilyUniverse, l: int, k: int, tail_start: int = 0) -> LargenessVerdict:
    """Whether every family's blocks from ``tail_start`` on meet ``X`` in more than ``k`` points.

    Blocks that reach past the window of ``X`` are skipped: their meet could
    still grow.  The first failing ``(family, block)`` is reported.
    """
    if not 0 <= k < l:
        raise InvalidInstance(f"largeness needs 0 <= k < l, got l={l}, k={k}")
    for fi, F in enumerate(U.families):
        for n, b in enumerate(F.blocks):
            if len(b) != l:
                raise InvalidInstance(f"family {fi} block {n} has {len(b)} elements, expected {l}")
    xs = X.as_set()
    for fi, F in enumerate(U.families):
        for n, b in enumerate(F.blocks):
            if n < tail_start or max(b) >= X.horizon:
                continue
            meet = len(b & xs)
            if meet <= k:
                return LargenessVerdict(False, fi, n, meet)
    return LargenessVerdict(True)


def subset_family(F: BlockFamily, A: Iterable[int]) -> BlockFamily:
    """Keep, in every block, the members at positions ``A`` of its increasing enumeration."""
    positions = sorted(set(A))
    if not positions:
        raise InvalidInstance("position set must be nonempty")
    if positions[0] < 0:
        raise InvalidInstance("positions must be natural numbers")
    out = []
    for n, b in enumerate(F.blocks):
        if len(b) <= positions[-1]:
            raise InvalidInstance(f"block {n} has {len(b)} elements; position {positions[-1]} is out of range")
        ordered = sorted(b)
        out.append(frozenset(ordered[i] for i in positions))
    return BlockFamily(F.horizon, tuple(out))


def concat_family(F: BlockFamily, l: int) -> BlockFamily:
    """Merge consecutive runs of ``l`` blocks; a trailing incomplete run is dropped."""
    if l < 1:
        raise InvalidInstance(f"group length must be positive, got {l}")
    if len(F) < l:
        raise TooFewElements(f"need at least {l} blocks, got {len(F)}")
    groups = len(F) // l
    return BlockFamily(
        F.horizon,
        tuple(frozenset().union(*F.blocks[l * n : l * n + l]) for n in range(groups)),
    )


@dataclass(frozen=True)
class TransferCheck:
    holds: bool
    every_subset_large: bool
    few_missing: bool
    subsets_checked: int
    failing_positions: tuple[int, ...] | None = None


def transfer_counting_check(K: Iterable[int], X: WSet | Iterable[int], l: int, k: int) -> TransferCheck:
    """Brute-force both sides of "every ``l``-subset of ``K`` meets ``X`` in more than ``k``
    points" versus "``|K \\ X| < l - k``" and report whether they agree."""
    ks = sorted(set(K))
    if l < 1 or len(ks) == 0 or len(ks) % l:
        raise InvalidInstance(f"|K| = {len(ks)} is not a positive multiple of l = {l}")
    if not k + 1 < l:
        raise InvalidInstance(f"need k + 1 < l, got l={l}, k={k}")
    xs = X.as_set() if isinstance(X, WSet) else frozenset(X)
    inside = [x in xs for x in ks]
    every = True
    failing = None
    count = 0
    for A in combinations(range(len(ks)), l):
        count += 1
        if sum(inside[i] for i in A) <= k:
            every = False
            if failing is None:
                failing = A
    few = sum(not v for v in inside) < l - k
    return TransferCheck(every == few, every, few, count, failing)


def split_into_2_3(K: Iterable[int], min_pieces: int) -> list[frozenset[int]]:
    """Cut ``K`` into consecutive pairs, with a final triple when ``|K|`` is odd."""
    ks = sorted(set(K))
    if len(ks) < 2:
        raise Infeasible(f"cannot split {len(ks)} points into pieces of size 2 or 3")
    if len(ks) // 2 < min_pieces:
        raise Infeasible(f"{len(ks)} points give at most {len(ks) // 2} pieces, fewer than {min_pieces}")
    pieces = [frozenset(ks[i : i + 2]) for i in range(0, len(ks) - len(ks) % 2, 2)]
    if len(ks) % 2:
        pieces[-1] = pieces[-1] | {ks[-1]}
    return pieces


def derived_Y(F: BlockFamily, X: WSet) -> WSet:
    """Indices of the blocks of ``F`` that meet ``X``."""
    xs = X.as_set()
    return WSet(max(len(F), 1), tuple(n for n, b in enumerate(F.blocks) if b & xs))


@dataclass(frozen=True)
class FLargeVerdict:
    disjunct: str  # "small-block", "large-meets" or "neither"
    index: int | None = None
    witnesses: tuple[int, ...] = field(default_factory=tuple)

    def to_json(self) -> dict[str, Any]:
        return {"disjunct": self.disjunct, "index": self.index, "witnesses": list(self.witnesses)}


def f_large_check(X: WSet, F: BlockFamily, f: Sequence[int], tail_start: int = 0) -> FLargeVerdict:
    """Which side of "some block has fewer than f(n)+2 points, or many blocks meet X in more
    than f(n)" is visible on the window."""
    if len(f) < len(F):
        raise InvalidInstance(f"f is defined on {len(f)} indices but F has {len(F)} blocks")
    for n, b in enumerate(F.blocks):
        if len(b) < f[n] + 2:
            return FLargeVerdict("small-block", n)
    xs = X.as_set()
    wits = tuple(
        n for n, b in enumerate(F.blocks) if n >= tail_start and len(b & xs) > f[n]
    )
    if wits:
        return FLargeVerdict("large-meets", None, wits)
    return FLargeVerdict("neither", None, ())
