"""Nice norms on finite sets of child labels.

A nice norm is monotone, loses at most one unit on one side of any
bisection, is positive on its whole base and at most 1 on singletons.  Two
concrete kinds are provided: explicit tables over small bases, and the
logarithmic norm ``⌊log₂ |A|⌋`` which depends only on ``|A|`` and so scales
to bases with tens of thousands of points.  Both carry an ``offset`` that is
subtracted (flooring at 0) to support lowering a norm uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterable, Iterator

import numpy as np

from ..errors import InvalidInstance, NormTableError

MAX_TABLE_BASE = 16


class NiceNorm:
    """Common interface; subclasses provide :meth:`raw`."""

    base: frozenset[int]
    offset: int

    def raw(self, A: frozenset[int]) -> int:  # pragma: no cover - abstract
        raise NotImplementedError

    def __call__(self, A: Iterable[int]) -> int:
        A = frozenset(A)
        if not A <= self.base:
            raise InvalidInstance(f"set {sorted(A)} is not inside the norm's base")
        return max(0, self.raw(A) - self.offset)

    def full(self) -> int:
        return self(self.base)

    def restrict(self, sub: Iterable[int]) -> "NiceNorm":  # pragma: no cover - abstract
        raise NotImplementedError

    def lowered(self, c: int) -> "NiceNorm":  # pragma: no cover - abstract
        raise NotImplementedError

    def to_json(self) -> dict[str, Any]:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class LogNorm(NiceNorm):
    """``max(0, ⌊log₂ |A|⌋ - offset)``, with ``|∅|`` read as 1."""

    base: frozenset[int]
    offset: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", frozenset(self.base))
        if self.offset < 0:
            raise InvalidInstance("norm offset must be >= 0")

    def raw(self, A: frozenset[int]) -> int:
        return max(1, len(A)).bit_length() - 1

    def value_of_size(self, size: int) -> int:
        return max(0, max(1, size).bit_length() - 1 - self.offset)

    def __call__(self, A: Iterable[int]) -> int:
        A = frozenset(A)
        if not A <= self.base:
            raise InvalidInstance(f"set {sorted(A)} is not inside the norm's base")
        return self.value_of_size(len(A))

    def restrict(self, sub: Iterable[int]) -> "LogNorm":
        sub = frozenset(sub)
        if not sub <= self.base:
            raise InvalidInstance("restriction must be to a subset of the base")
        return LogNorm(sub, self.offset)

    def lowered(self, c: int) -> "LogNorm":
        return LogNorm(self.base, self.offset + c)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": "log"}
        if self.offset:
            out["offset"] = self.offset
        return out


@dataclass(frozen=True, eq=False)
class TableNorm(NiceNorm):
    """Explicit values on every subset of a base of at most 16 labels.

    ``values[mask]`` is the value of the subset whose members are the
    labels at the set bit positions of ``mask`` in the sorted base.
    """

    base: frozenset[int]
    values: tuple[int, ...]
    offset: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", frozenset(self.base))
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.base) > MAX_TABLE_BASE:
            raise NormTableError(f"table norms are limited to bases of {MAX_TABLE_BASE} labels")
        if len(self.values) != 1 << len(self.base):
            raise NormTableError(
                f"table has {len(self.values)} entries; a base of {len(self.base)} needs {1 << len(self.base)}"
            )
        if any(v < 0 for v in self.values) or self.offset < 0:
            raise NormTableError("norm values must be natural numbers")
        order = tuple(sorted(self.base))
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_pos", {x: i for i, x in enumerate(order)})

    @classmethod
    def from_function(cls, base: Iterable[int], fn) -> "TableNorm":
        order = sorted(set(base))
        vals = []
        for mask in range(1 << len(order)):
            vals.append(int(fn(frozenset(order[i] for i in range(len(order)) if mask >> i & 1))))
        return cls(frozenset(order), tuple(vals))

    @classmethod
    def from_table(cls, base: Iterable[int], table: dict[frozenset[int], int], offset: int = 0) -> "TableNorm":
        order = sorted(set(base))
        vals = []
        for mask in range(1 << len(order)):
            key = frozenset(order[i] for i in range(len(order)) if mask >> i & 1)
            if key not in table:
                raise NormTableError(f"table is not total: missing subset {sorted(key)}")
            vals.append(table[key])
        return cls(frozenset(order), tuple(vals), offset)

    def mask_of(self, A: Iterable[int]) -> int:
        m = 0
        for x in A:
            m |= 1 << self._pos[x]
        return m

    def subset_of(self, mask: int) -> frozenset[int]:
        return frozenset(x for i, x in enumerate(self._order) if mask >> i & 1)

    def raw(self, A: frozenset[int]) -> int:
        return self.values[self.mask_of(A)]

    def effective_values(self) -> np.ndarray:
        return np.maximum(0, np.asarray(self.values, dtype=np.int64) - self.offset)

    def restrict(self, sub: Iterable[int]) -> "TableNorm":
        sub = frozenset(sub)
        if not sub <= self.base:
            raise InvalidInstance("restriction must be to a subset of the base")
        order = sorted(sub)
        vals = []
        for mask in range(1 << len(order)):
            vals.append(self.values[self.mask_of(order[i] for i in range(len(order)) if mask >> i & 1)])
        return TableNorm(sub, tuple(vals), self.offset)

    def lowered(self, c: int) -> "TableNorm":
        return TableNorm(self.base, self.values, self.offset + c)

    def to_json(self) -> dict[str, Any]:
        # Masks in the file use the labels themselves as bit positions.
        eff = self.effective_values()
        table = []
        for mask in range(len(self.values)):
            label_mask = sum(1 << x for x in self.subset_of(mask))
            table.append([label_mask, int(eff[mask])])
        return {"table": table}


def norm_from_json(data: dict[str, Any], base: Iterable[int]) -> NiceNorm:
    base = frozenset(base)
    if data.get("kind") == "log":
        return LogNorm(base, int(data.get("offset", 0)))
    if "table" not in data:
        raise NormTableError("norm entry needs either kind='log' or a table")
    table: dict[frozenset[int], int] = {}
    for label_mask, value in data["table"]:
        members = frozenset(i for i in range(int(label_mask).bit_length()) if label_mask >> i & 1)
        table[members] = int(value)
    return TableNorm.from_table(base, table, int(data.get("offset", 0)))


def norms_agree(a: NiceNorm, b: NiceNorm) -> bool:
    """Whether two norms take the same values on every subset of a common base."""
    if a.base != b.base:
        return False
    if isinstance(a, LogNorm) and isinstance(b, LogNorm):
        return all(a.value_of_size(s) == b.value_of_size(s) for s in range(len(a.base) + 1))
    if len(a.base) > MAX_TABLE_BASE:
        raise NormTableError("cannot compare a table norm with a base this large")
    order = sorted(a.base)
    for mask in range(1 << len(order)):
        A = frozenset(order[i] for i in range(len(order)) if mask >> i & 1)
        if a(A) != b(A):
            return False
    return True


def restricts_to(big: NiceNorm, small: NiceNorm) -> bool:
    """Whether ``small`` is ``big`` restricted to the power set of ``small.base``."""
    if not small.base <= big.base:
        return False
    if isinstance(big, LogNorm) and isinstance(small, LogNorm):
        return big.offset == small.offset or all(
            big.value_of_size(s) == small.value_of_size(s) for s in range(len(small.base) + 1)
        )
    return norms_agree(big.restrict(small.base), small)


# -- validation -----------------------------------------------------------------


@dataclass(frozen=True)
class NormCheck:
    valid: bool
    axiom: str | None = None
    B: frozenset[int] | None = None
    C: frozenset[int] | None = None

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "axiom": self.axiom,
            "B": None if self.B is None else sorted(self.B),
            "C": None if self.C is None else sorted(self.C),
        }


def _submasks(C: int, nbits: int) -> np.ndarray:
    """All submasks of ``C`` as an array (bit deposit of a counter)."""
    positions = [i for i in range(nbits) if C >> i & 1]
    counter = np.arange(1 << len(positions), dtype=np.int64)
    out = np.zeros_like(counter)
    for j, p in enumerate(positions):
        out |= ((counter >> j) & 1) << p
    return out


VECTOR_BISECTION = 10  # 3**10 (subset, superset) pairs


@lru_cache(maxsize=None)
def _submask_pairs(size: int) -> tuple[np.ndarray, np.ndarray]:
    """Every pair ``B ⊆ C`` of masks over ``size`` bits, ordered by ``C`` then ``B``."""
    Cs, Bs = [], []
    for c in range(1 << size):
        subs = np.sort(_submasks(c, size))
        Cs.append(np.full(len(subs), c, dtype=np.int64))
        Bs.append(subs)
    return np.concatenate(Cs), np.concatenate(Bs)


def validate_norm(n: NiceNorm) -> NormCheck:
    """Check all four axioms; on failure report the axiom and a witness pair ``(B, C)``."""
    if isinstance(n, LogNorm):
        if n(n.base) <= 0:
            return NormCheck(False, "positive-on-base", frozenset(), n.base)
        return NormCheck(True)
    if not isinstance(n, TableNorm):
        raise NormTableError("only table and log norms can be validated")
    size = len(n.base)
    full = (1 << size) - 1
    vals = n.effective_values()
    if vals[full] <= 0:
        return NormCheck(False, "positive-on-base", frozenset(), n.base)
    for i in range(size):
        if vals[1 << i] > 1:
            return NormCheck(False, "singleton-at-most-1", frozenset(), n.subset_of(1 << i))
    # monotonicity is transitive, so removing one element at a time suffices
    masks = np.arange(1 << size, dtype=np.int64)
    for i in range(size):
        has = (masks >> i) & 1 == 1
        C = masks[has]
        bad = vals[C ^ (1 << i)] > vals[C]
        if bad.any():
            c = int(C[np.argmax(bad)])
            return NormCheck(False, "monotone", n.subset_of(c ^ (1 << i)), n.subset_of(c))
    if size <= VECTOR_BISECTION:
        C, B = _submask_pairs(size)
        ok = np.maximum(vals[B], vals[B ^ C]) >= vals[C] - 1
        if not ok.all():
            i = int(np.argmin(ok))
            return NormCheck(False, "bisection", n.subset_of(int(B[i])), n.subset_of(int(C[i])))
        return NormCheck(True)
    for c in range(1 << size):
        vc = vals[c]
        if vc <= 0:
            continue
        subs = _submasks(c, size)
        ok = np.maximum(vals[subs], vals[subs ^ c]) >= vc - 1
        if not ok.all():
            b = int(subs[np.argmin(ok)])
            return NormCheck(False, "bisection", n.subset_of(b), n.subset_of(c))
    return NormCheck(True)


def iter_subsets(base: Iterable[int]) -> Iterator[frozenset[int]]:
    order = sorted(base)
    for mask in range(1 << len(order)):
        yield frozenset(order[i] for i in range(len(order)) if mask >> i & 1)


def random_table_norm(base: Iterable[int], rng: np.random.Generator, halve: bool | None = None) -> TableNorm:
    """A random nice norm: the maximum of a few weighted log norms, possibly halved.

    The maximum of nice norms that are positive on the base is again nice,
    and so is ``⌊v/2⌋`` of one whose base value is at least 2; the result is
    validated regardless and falls back to the plain log norm otherwise.
    """
    order = sorted(set(base))
    size = len(order)
    if size < 2:
        raise InvalidInstance("a nice norm needs at least 2 points in its base")
    pieces = int(rng.integers(1, 4))
    weights = []
    for _ in range(pieces):
        weights.append(rng.integers(1, 4, size=size))
    vals = np.zeros(1 << size, dtype=np.int64)
    masks = np.arange(1 << size, dtype=np.int64)
    for w in weights:
        total = np.zeros(1 << size, dtype=np.int64)
        for i in range(size):
            total += ((masks >> i) & 1) * int(w[i])
        # ⌊log₂ weighted size⌋ with weight-1 singletons capped to stay ≤ 1
        v = np.where(total > 0, np.floor(np.log2(np.maximum(total, 1))).astype(np.int64), 0)
        vals = np.maximum(vals, v)
    if halve is None:
        halve = bool(rng.integers(0, 2))
    if halve and vals[-1] >= 2:
        vals = vals // 2
    cand = TableNorm(frozenset(order), tuple(int(v) for v in vals))
    if validate_norm(cand):
        return cand
    plain = TableNorm.from_function(order, lambda A: max(1, len(A)).bit_length() - 1)
    return plain
