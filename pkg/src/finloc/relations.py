"""Localization relations evaluated on finite windows.

Each evaluator computes the inner predicate at every index whose verdict is
fixed by the data inside the horizon, and returns a :class:`QuantifierReport`.
How to read "for almost all n" or "for infinitely many n" off that report is
left to the caller: ``tail_holds_from`` is the finite shadow of ∀^∞ and the
witness count is the finite shadow of ∃^∞.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Any, Callable, Hashable, Sequence

from .errors import (
    HorizonMismatch,
    InvalidInstance,
    NoDominatingSet,
    TooFewElements,
)
from .finsets import BlockFamily, WSet

RICH = 2  # a gap is "rich" when it holds at least this many points of X
MAX_EXHAUSTIVE = 24


@dataclass(frozen=True)
class QuantifierReport:
    witnesses: tuple[int, ...]
    evaluated_up_to: int
    tail_holds_from: int | None

    def __post_init__(self) -> None:
        if self.witnesses and (self.witnesses[0] < 0 or self.witnesses[-1] > self.evaluated_up_to):
            raise InvalidInstance("witnesses must lie in [0, evaluated_up_to]")

    @classmethod
    def from_verdicts(cls, verdicts: Sequence[bool]) -> "QuantifierReport":
        witnesses = tuple(n for n, ok in enumerate(verdicts) if ok)
        tail = None
        for n in range(len(verdicts) - 1, -1, -1):
            if not verdicts[n]:
                break
            tail = n
        return cls(witnesses, len(verdicts) - 1, tail)

    @property
    def count(self) -> int:
        return len(self.witnesses)

    def holds_almost_always(self) -> bool:
        """Window reading of ∀^∞: some tail of the evaluated range consists of witnesses."""
        return self.tail_holds_from is not None

    def holds_infinitely_often(self, threshold: int = 1) -> bool:
        """Window reading of ∃^∞: at least ``threshold`` witnesses."""
        return len(self.witnesses) >= threshold

    def to_json(self) -> dict[str, Any]:
        return {
            "witnesses": list(self.witnesses),
            "evaluated_up_to": self.evaluated_up_to,
            "tail_holds_from": self.tail_holds_from,
        }


def _block_counts(X: WSet, F: BlockFamily) -> list[int]:
    xs = X.as_set()
    counts = []
    for n, b in enumerate(F.blocks):
        if max(b) >= X.horizon:
            raise HorizonMismatch(f"block {n} reaches {max(b)}, past the horizon {X.horizon} of X")
        counts.append(len(b & xs))
    return counts


def eval_R_forall_k(X: WSet, F: BlockFamily, k: int) -> QuantifierReport:
    """Indices ``n`` with ``|X ∩ K_n| <= k``; read as "almost all n" via the tail."""
    return QuantifierReport.from_verdicts([c <= k for c in _block_counts(X, F)])


def eval_R_exists_k(X: WSet, F: BlockFamily, k: int) -> QuantifierReport:
    """Same inner predicate as :func:`eval_R_forall_k`; read as "infinitely many n" via the count."""
    return QuantifierReport.from_verdicts([c <= k for c in _block_counts(X, F)])


def rich_gaps(X: WSet, Y: WSet, threshold: int = RICH) -> list[bool]:
    """Richness of each gap of ``Y`` whose right end lies inside the window of ``X``.

    Gaps that end beyond the horizon of ``X`` are dropped: a short count
    there could still grow.
    """
    ys = Y.elements
    out = []
    for a, b in zip(ys, ys[1:]):
        if b > X.horizon:
            break
        out.append(X.count_in(a, b) >= threshold)
    return out


def _runs_ok(rich: Sequence[bool], start: int, length: int) -> bool:
    return all(rich[start : start + length])


def eval_S_k(X: WSet, Y: WSet, k: int, threshold: int = RICH) -> QuantifierReport:
    """Indices ``n`` where the ``k`` consecutive ``Y``-gaps from ``n`` are all rich in ``X``."""
    if k < 1:
        raise InvalidInstance(f"S_k needs k >= 1, got {k}")
    if len(Y) < k + 1:
        raise TooFewElements(f"S_{k} needs at least {k + 1} points of Y, got {len(Y)}")
    rich = rich_gaps(X, Y, threshold)
    return QuantifierReport.from_verdicts(
        [_runs_ok(rich, n, k) for n in range(len(rich) - k + 1)]
    )


@dataclass(frozen=True)
class RunWitness:
    length: int
    start: int | None

    @property
    def holds(self) -> bool:
        return self.start is not None


def eval_S_plus(X: WSet, Y: WSet, m: int, threshold: int = RICH) -> RunWitness:
    """The least start of ``m`` consecutive rich gaps, if the window has one."""
    if m < 1:
        raise InvalidInstance(f"run length must be >= 1, got {m}")
    if len(Y) < m + 1:
        raise TooFewElements(f"a run of {m} gaps needs {m + 1} points of Y, got {len(Y)}")
    rich = rich_gaps(X, Y, threshold)
    run = 0
    for j, ok in enumerate(rich):
        run = run + 1 if ok else 0
        if run >= m:
            return RunWitness(m, j - m + 1)
    return RunWitness(m, None)


def s_plus_profile(X: WSet, Y: WSet, m_max: int, threshold: int = RICH) -> dict[int, int | None]:
    """Least run start for every ``m <= m_max`` that the window can express."""
    m_max = min(m_max, len(Y) - 1)
    return {m: eval_S_plus(X, Y, m, threshold).start for m in range(1, m_max + 1)}


def eval_S_plus_eps(X: WSet, Y: WSet, threshold: int = RICH) -> QuantifierReport:
    """Indices ``n`` where all ``2**n`` gaps starting at gap ``2**n`` are rich.

    Only ``n`` with ``2**(n+1) <= #gaps`` are evaluated; larger ``n`` are past
    the window and show up as a small ``evaluated_up_to``.
    """
    rich = rich_gaps(X, Y, threshold)
    verdicts = []
    n = 0
    while 2 ** (n + 1) <= len(rich):
        verdicts.append(_runs_ok(rich, 2**n, 2**n))
        n += 1
    return QuantifierReport.from_verdicts(verdicts)


def check_phi(phi: Sequence[int], strict: bool = True) -> None:
    if any(v < 0 for v in phi):
        raise InvalidInstance("phi must take natural values")
    for a, b in zip(phi, phi[1:]):
        if (a >= b) if strict else (a > b):
            raise InvalidInstance(
                "phi must be strictly increasing" if strict else "phi must be non-decreasing"
            )


def eval_S_plus_phi(
    X: WSet, Y: WSet, phi: Sequence[int], threshold: int = RICH, strict: bool = True
) -> QuantifierReport:
    """Indices ``n`` where the ``phi[n]`` gaps starting at ``n`` are all rich."""
    check_phi(phi, strict)
    rich = rich_gaps(X, Y, threshold)
    verdicts = []
    for n, length in enumerate(phi):
        if n + length > len(rich):
            break
        verdicts.append(_runs_ok(rich, n, length))
    return QuantifierReport.from_verdicts(verdicts)


# -- finite b(R) and d(R) ---------------------------------------------------


@dataclass(frozen=True)
class FiniteRelationInstance:
    """A total 0/1 table ``holds[i][j]`` between ``left[i]`` and ``right[j]``."""

    left: tuple[Hashable, ...]
    right: tuple[Hashable, ...]
    holds: tuple[tuple[bool, ...], ...]

    def __post_init__(self) -> None:
        if len(self.holds) != len(self.left) or any(len(r) != len(self.right) for r in self.holds):
            raise InvalidInstance("relation table must be total: one entry per (left, right) pair")

    @classmethod
    def from_predicate(
        cls, left: Sequence[Hashable], right: Sequence[Hashable], pred: Callable[[Any, Any], bool]
    ) -> "FiniteRelationInstance":
        return cls(tuple(left), tuple(right), tuple(tuple(bool(pred(x, y)) for y in right) for x in left))

    def satisfies_dom_rng(self) -> bool:
        """Both ``R`` and its complement have full domain and full range."""
        rows_ok = all(any(r) and not all(r) for r in self.holds)
        cols = list(zip(*self.holds)) if self.holds else []
        cols_ok = len(cols) == len(self.right) and all(any(c) and not all(c) for c in cols)
        return rows_ok and cols_ok

    def complement_inverse(self) -> "FiniteRelationInstance":
        """``cR⁻¹``: ``(y, x)`` holds iff ``(x, y)`` does not hold in ``R``."""
        return FiniteRelationInstance(
            self.right,
            self.left,
            tuple(
                tuple(not self.holds[i][j] for i in range(len(self.left)))
                for j in range(len(self.right))
            ),
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "left": list(self.left),
            "right": list(self.right),
            "holds": [[int(v) for v in row] for row in self.holds],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "FiniteRelationInstance":
        return cls(
            tuple(data["left"]),
            tuple(data["right"]),
            tuple(tuple(bool(v) for v in row) for row in data["holds"]),
        )


@dataclass(frozen=True)
class OptimalSet:
    size: int
    members: tuple[Hashable, ...]


def _min_cover(masks: Sequence[int], full: int) -> tuple[int, ...] | None:
    """Indices of a smallest subfamily of ``masks`` whose union is ``full``."""
    if full == 0:
        return ()
    total = 0
    for m in masks:
        total |= m
    if total != full:
        return None
    for size in range(1, len(masks) + 1):
        for combo in combinations(range(len(masks)), size):
            acc = 0
            for i in combo:
                acc |= masks[i]
            if acc == full:
                return combo
    return None  # pragma: no cover - unreachable once the union is full


def d_fin(inst: FiniteRelationInstance) -> OptimalSet:
    """Least ``|D|`` with every left point related to some member of ``D``."""
    if not inst.left or not inst.right:
        raise InvalidInstance("universes must be nonempty")
    if len(inst.right) > MAX_EXHAUSTIVE:
        raise InvalidInstance(f"exhaustive search is capped at {MAX_EXHAUSTIVE} right points")
    masks = [
        sum(1 << i for i in range(len(inst.left)) if inst.holds[i][j]) for j in range(len(inst.right))
    ]
    found = _min_cover(masks, (1 << len(inst.left)) - 1)
    if found is None:
        raise NoDominatingSet("some left point is related to nothing; no dominating set exists")
    return OptimalSet(len(found), tuple(inst.right[j] for j in found))


def b_fin(inst: FiniteRelationInstance) -> OptimalSet:
    """Least ``|B|`` such that every right point fails to relate some member of ``B``."""
    if not inst.left or not inst.right:
        raise InvalidInstance("universes must be nonempty")
    if len(inst.left) > MAX_EXHAUSTIVE:
        raise InvalidInstance(f"exhaustive search is capped at {MAX_EXHAUSTIVE} left points")
    masks = [
        sum(1 << j for j in range(len(inst.right)) if not inst.holds[i][j]) for i in range(len(inst.left))
    ]
    found = _min_cover(masks, (1 << len(inst.right)) - 1)
    if found is None:
        raise NoDominatingSet("some right point is related to everything; no unbounded set exists")
    return OptimalSet(len(found), tuple(inst.left[i] for i in found))


def duality_values(inst: FiniteRelationInstance) -> dict[str, int]:
    """``d`` and ``b`` of ``R`` and of ``cR⁻¹``; expect ``d == b_dual`` and ``b == d_dual``."""
    dual = inst.complement_inverse()
    return {
        "d": d_fin(inst).size,
        "b": b_fin(inst).size,
        "d_dual": d_fin(dual).size,
        "b_dual": b_fin(dual).size,
    }
