"""Finite windows onto infinite subsets of the naturals and families of blocks.

An infinite set ``X`` is never materialised; instead a :class:`WSet` records
the elements of ``X`` below an explicit ``horizon``.  Everything downstream
is careful to say which verdicts could be changed by data past the horizon.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import InvalidInstance, TooFewElements, WindowTooShort


@dataclass(frozen=True)
class Window:
    horizon: int

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise InvalidInstance(f"horizon must be >= 1, got {self.horizon}")


@dataclass(frozen=True)
class WSet:
    """The part of an intended-infinite set lying in ``[0, horizon)``."""

    horizon: int
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        Window(self.horizon)
        els = self.elements
        for a, b in zip(els, els[1:]):
            if a >= b:
                raise InvalidInstance("WSet elements must be strictly increasing")
        if els and (els[0] < 0 or els[-1] >= self.horizon):
            raise InvalidInstance(
                f"WSet elements must lie in [0, {self.horizon}), got {els[0]}..{els[-1]}"
            )

    @classmethod
    def of(cls, elements: Iterable[int], horizon: int | None = None) -> "WSet":
        els = tuple(sorted(set(elements)))
        if horizon is None:
            horizon = els[-1] + 1 if els else 1
        return cls(horizon, els)

    @classmethod
    def interval(cls, lo: int, hi: int, horizon: int | None = None) -> "WSet":
        return cls.of(range(lo, hi), hi if horizon is None else horizon)

    @property
    def window(self) -> Window:
        return Window(self.horizon)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, int):
            return False
        i = bisect_left(self.elements, x)
        return i < len(self.elements) and self.elements[i] == x

    def as_set(self) -> frozenset[int]:
        return frozenset(self.elements)

    def count_in(self, lo: int, hi: int) -> int:
        """``|X ∩ [lo, hi)|`` by bisection."""
        return bisect_left(self.elements, hi) - bisect_left(self.elements, lo)

    def to_json(self) -> dict[str, Any]:
        return {"horizon": self.horizon, "elements": list(self.elements)}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "WSet":
        return cls(int(data["horizon"]), tuple(sorted(int(x) for x in data["elements"])))


def mu(X: WSet, n: int) -> int:
    """The ``n``-th element of ``X`` in increasing order (0-based)."""
    if n < 0:
        raise InvalidInstance(f"enumeration index must be >= 0, got {n}")
    if n >= len(X.elements):
        raise WindowTooShort(
            f"window holds {len(X.elements)} elements, index {n} is past the horizon {X.horizon}"
        )
    return X.elements[n]


@dataclass(frozen=True)
class BlockFamily:
    """An ordered family of pairwise disjoint nonempty finite blocks.

    Blocks are kept sorted by their minimum.  With ``covering=True`` the
    blocks tile a contiguous interval ``[min, max + 1)`` with no gaps; for a
    partition of an initial segment that interval starts at 0.
    """

    horizon: int
    blocks: tuple[frozenset[int], ...]
    covering: bool = False

    def __post_init__(self) -> None:
        Window(self.horizon)
        blocks = tuple(frozenset(b) for b in self.blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise InvalidInstance("blocks must be nonempty")
            if min(b) < 0 or max(b) >= self.horizon:
                raise InvalidInstance(f"block {sorted(b)} leaves the window [0, {self.horizon})")
            if seen & b:
                raise InvalidInstance("blocks must be pairwise disjoint")
            seen |= b
        blocks = tuple(sorted(blocks, key=min))
        object.__setattr__(self, "blocks", blocks)
        if self.covering and seen:
            lo, hi = min(seen), max(seen)
            if len(seen) != hi - lo + 1:
                raise InvalidInstance("covering family leaves a gap inside its span")

    @classmethod
    def of(
        cls, blocks: Iterable[Iterable[int]], horizon: int | None = None, covering: bool = False
    ) -> "BlockFamily":
        bs = tuple(frozenset(b) for b in blocks)
        if horizon is None:
            horizon = max((max(b) for b in bs if b), default=0) + 1
        return cls(horizon, bs, covering)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, n: int) -> frozenset[int]:
        return self.blocks[n]

    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]

    def support(self) -> frozenset[int]:
        return frozenset().union(*self.blocks)

    def to_json(self) -> dict[str, Any]:
        return {
            "horizon": self.horizon,
            "covering": self.covering,
            "blocks": [sorted(b) for b in self.blocks],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "BlockFamily":
        return cls(
            int(data["horizon"]),
            tuple(frozenset(int(x) for x in b) for b in data["blocks"]),
            bool(data.get("covering", False)),
        )


@dataclass(frozen=True)
class IntervalPartition:
    """Cut points ``k_0 = 0 < k_1 < ...`` inducing blocks ``[k_n, k_{n+1})``."""

    cutpoints: tuple[int, ...]

    def __post_init__(self) -> None:
        cps = self.cutpoints
        if not cps or cps[0] != 0:
            raise InvalidInstance("cutpoints must start at 0")
        for a, b in zip(cps, cps[1:]):
            if a >= b:
                raise InvalidInstance("cutpoints must be strictly increasing")

    def __len__(self) -> int:
        return len(self.cutpoints) - 1

    def block(self, n: int) -> range:
        return range(self.cutpoints[n], self.cutpoints[n + 1])

    def to_family(self, horizon: int | None = None) -> BlockFamily:
        top = self.cutpoints[-1]
        return BlockFamily(
            max(top, 1) if horizon is None else horizon,
            tuple(frozenset(self.block(n)) for n in range(len(self))),
            covering=True,
        )


def in_P_k(F: BlockFamily, k: int) -> bool:
    """Whether every block has more than ``k`` elements."""
    return all(len(b) > k for b in F.blocks)


def intervals_of(X: WSet) -> BlockFamily:
    """The family of half-open gaps ``[μ_X(n), μ_X(n+1))`` between consecutive points."""
    els = X.elements
    if len(els) < 2:
        raise TooFewElements(f"need at least 2 points to form an interval, got {len(els)}")
    return BlockFamily(
        X.horizon,
        tuple(frozenset(range(a, b)) for a, b in zip(els, els[1:])),
        covering=True,
    )


def gap_counts(X: WSet, Y: WSet) -> list[int]:
    """``|[μ_Y(j), μ_Y(j+1)) ∩ X|`` for every complete gap of ``Y``."""
    ys = Y.elements
    return [X.count_in(a, b) for a, b in zip(ys, ys[1:])]
