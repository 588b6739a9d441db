"""Creatures: finite labeled trees with norms on their wide nodes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from ..errors import (
    CreatureError,
    IntervalOverlap,
    InvalidInstance,
    NormAxiomViolation,
    SuccessiveRamification,
)
from .norms import LogNorm, NiceNorm, norm_from_json, norms_agree, validate_norm

Path = tuple[int, ...]

LEAF, KSPLIT, WIDE = "leaf", "k", "wide"


@dataclass(frozen=True, eq=False)
class Creature:
    """A tree of paths with left/right labels ``L``, ``R`` and a norm on every
    node with more than ``k`` successors.

    Construction does not validate; call :func:`validate_creature` (or build
    through :func:`make_creature`) to check the structural axioms.
    """

    k: int
    L: Mapping[Path, int]
    R: Mapping[Path, int]
    norms: Mapping[Path, NiceNorm] = field(default_factory=dict)

    def __post_init__(self) -> None:
        L = {tuple(p): int(v) for p, v in self.L.items()}
        R = {tuple(p): int(v) for p, v in self.R.items()}
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "norms", {tuple(p): n for p, n in self.norms.items()})
        kids: dict[Path, list[int]] = {p: [] for p in L}
        for p in L:
            if p:
                if p[:-1] not in kids:
                    raise InvalidInstance(f"tree is not prefix-closed at {p}")
                kids[p[:-1]].append(p[-1])
        object.__setattr__(self, "_children", {p: tuple(sorted(v)) for p, v in kids.items()})

    @classmethod
    def _trusted(
        cls,
        k: int,
        L: dict[Path, int],
        R: dict[Path, int],
        norms: dict[Path, NiceNorm],
        children: dict[Path, tuple[int, ...]],
    ) -> "Creature":
        """Skip normalisation for internally built, already normalised data."""
        t = object.__new__(cls)
        for name, v in (("k", k), ("L", L), ("R", R), ("norms", norms), ("_children", children)):
            object.__setattr__(t, name, v)
        return t

    # -- tree access ---------------------------------------------------------

    @property
    def nodes(self) -> list[Path]:
        return list(self.L)

    def __contains__(self, p: object) -> bool:
        return p in self.L

    def __len__(self) -> int:
        return len(self.L)

    def children(self, p: Path) -> tuple[int, ...]:
        """Labels ``i`` with ``p + (i,)`` in the tree."""
        return self._children[p]

    def kind(self, p: Path) -> str:
        return node_kind(len(self._children[p]), self.k)

    def is_leaf(self, p: Path) -> bool:
        return not self._children[p]

    def leaves(self) -> list[Path]:
        return [p for p, c in self._children.items() if not c]

    def wide_nodes(self) -> list[Path]:
        return [p for p, c in self._children.items() if len(c) > self.k]

    def span(self, p: Path = ()) -> tuple[int, int]:
        return self.L[p], self.R[p]

    def cone(self, p: Path) -> "Creature":
        """The subtree above ``p``, re-rooted at ``()``."""
        n = len(p)
        keep = [q for q in self.L if q[:n] == p]
        return Creature(
            self.k,
            {q[n:]: self.L[q] for q in keep},
            {q[n:]: self.R[q] for q in keep},
            {q[n:]: self.norms[q] for q in keep if q in self.norms},
        )

    def to_json(self) -> dict[str, Any]:
        order = sorted(self.L, key=lambda p: (len(p), p))
        return {
            "k": self.k,
            "nodes": [{"path": list(p), "L": self.L[p], "R": self.R[p]} for p in order],
            "norms": [
                {"path": list(p), **self.norms[p].to_json()}
                for p in sorted(self.norms, key=lambda p: (len(p), p))
            ],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Creature":
        L = {tuple(n["path"]): int(n["L"]) for n in data["nodes"]}
        R = {tuple(n["path"]): int(n["R"]) for n in data["nodes"]}
        tmp = cls(int(data["k"]), L, R, {})
        norms = {}
        for entry in data.get("norms", []):
            p = tuple(entry["path"])
            if p not in L:
                raise InvalidInstance(f"norm given for {p}, which is not a node")
            norms[p] = norm_from_json(entry, tmp.children(p))
        return cls(tmp.k, L, R, norms)


def node_kind(num_children: int, k: int) -> str:
    if num_children == 0:
        return LEAF
    if num_children == k:
        return KSPLIT
    if num_children > k:
        return WIDE
    return f"invalid({num_children})"


def make_creature(
    k: int, L: Mapping[Path, int], R: Mapping[Path, int], norms: Mapping[Path, NiceNorm] | None = None
) -> Creature:
    t = Creature(k, L, R, norms or {})
    validate_creature(t)
    return t


def validate_creature(t: Creature, check_norms: bool = True) -> None:
    """Raise a :class:`CreatureError` subclass naming the first broken axiom."""
    if t.k < 1:
        raise CreatureError(f"branching parameter must be >= 1, got {t.k}")
    if () not in t.L:
        raise CreatureError("tree must contain the root ()")
    if set(t.L) != set(t.R):
        raise CreatureError("L and R must be defined on the same nodes")
    for p in t.L:
        kids = t.children(p)
        kind = t.kind(p)
        if kind.startswith("invalid"):
            raise CreatureError(f"node {p} has {len(kids)} successors: need 0, exactly k={t.k}, or more")
        if kind == WIDE:
            if p not in t.norms:
                raise CreatureError(f"wide node {p} carries no norm")
            n = t.norms[p]
            if n.base != frozenset(kids):
                raise CreatureError(f"norm at {p} is not on the successor labels")
            if check_norms:
                verdict = validate_norm(n)
                if not verdict:
                    raise NormAxiomViolation(f"norm at {p} fails the {verdict.axiom} axiom")
        elif p in t.norms:
            raise CreatureError(f"node {p} is not wide but carries a norm")
        if kind == KSPLIT:
            for i in kids:
                if t.kind(p + (i,)) == KSPLIT:
                    raise SuccessiveRamification(f"nodes {p} and {p + (i,)} are both k-splitting")
        lo, hi = t.L[p], t.R[p]
        if lo > hi:
            raise CreatureError(f"node {p} has L > R")
        if not kids and lo != hi:
            raise CreatureError(f"leaf {p} has L != R")
        spans = sorted((t.L[p + (i,)], t.R[p + (i,)]) for i in kids)
        for a, b in spans:
            if a < lo or b > hi:
                raise IntervalOverlap(f"a child interval of {p} leaves [{lo}, {hi}]")
        for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
            if a1 <= b0:
                raise IntervalOverlap(f"children of {p} have overlapping intervals")


def is_valid_creature(t: Creature) -> bool:
    try:
        validate_creature(t)
    except CreatureError:
        return False
    return True


def weight(t: Creature) -> int:
    """Least full-successor norm over the wide nodes, 0 when there are none."""
    vals = [t.norms[p](frozenset(t.children(p))) for p in t.wide_nodes()]
    return min(vals, default=0)


def contribution(t: Creature) -> frozenset[int]:
    return frozenset(t.L[p] for p in t.leaves())


def creatures_equal(a: Creature, b: Creature) -> bool:
    """Same tree, labels, branching parameter and norm values."""
    if a.k != b.k or a.L != b.L or a.R != b.R or set(a.norms) != set(b.norms):
        return False
    return all(norms_agree(a.norms[p], b.norms[p]) for p in a.norms)


def signature(t: Creature) -> tuple:
    """Hashable summary; equal creatures have equal signatures."""
    norm_sig = []
    for p in sorted(t.norms):
        n = t.norms[p]
        if isinstance(n, LogNorm):
            norm_sig.append((p, "log", n.offset))
        else:
            norm_sig.append((p, "table", tuple(int(v) for v in n.effective_values())))
    return (t.k, tuple(sorted(t.L.items())), tuple(sorted(t.R.items())), tuple(norm_sig))


def restrict_creature(t: Creature, keep: Iterable[Path]) -> Creature:
    """The sub-creature on the given prefix-closed node set, norms restricted."""
    keep = set(keep)
    if () not in keep:
        raise InvalidInstance("the kept nodes must include the root")
    missing = keep - t.L.keys()
    if missing:
        raise InvalidInstance(f"{min(missing)} is not a node of the creature")
    L = {p: t.L[p] for p in keep}
    R = {p: t.R[p] for p in keep}
    children = {}
    for p in keep:
        if p and p[:-1] not in keep:
            raise InvalidInstance(f"kept nodes are not prefix-closed at {p}")
        kids = t.children(p)
        children[p] = tuple(c for c in kids if p + (c,) in keep) if kids else kids
    norms = {}
    for p in keep:
        if p in t.norms and len(children[p]) > t.k:
            n = t.norms[p]
            norms[p] = n if len(children[p]) == len(t.children(p)) else n.restrict(children[p])
    return Creature._trusted(t.k, L, R, norms, children)


def leaf_creature(k: int, at: int) -> Creature:
    return Creature(k, {(): at}, {(): at}, {})
