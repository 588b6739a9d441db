"""Operations on creatures: refinement, upper half, building and gluing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from ..errors import CreatureError, IntervalOverlap, SuccessiveRamification
from .creature import KSPLIT, Creature, Path, node_kind, weight
from .norms import NiceNorm, norms_agree, restricts_to, validate_norm


def refines(t0: Creature, t1: Creature) -> bool:
    """Whether ``t1`` is obtained from ``t0`` by shrinking: a subtree with the
    same labels, the same kind at every kept node, and restricted norms."""
    if t0.k != t1.k:
        return False
    for p in t1.L:
        if p not in t0.L or t0.L[p] != t1.L[p] or t0.R[p] != t1.R[p]:
            return False
        if node_kind(len(t1.children(p)), t1.k) != node_kind(len(t0.children(p)), t0.k):
            return False
    for p, n in t1.norms.items():
        if p not in t0.norms or not restricts_to(t0.norms[p], n):
            return False
    return True


def upper_half(t: Creature) -> Creature:
    """Lower every norm by ``⌊‖t‖/2⌋`` (flooring values at 0)."""
    c = weight(t) // 2
    if c == 0:
        return t
    return Creature(t.k, t.L, t.R, {p: n.lowered(c) for p, n in t.norms.items()})


def _check_increasing(parts: Sequence[Creature]) -> None:
    for a, b in zip(parts, parts[1:]):
        if a.R[()] >= b.L[()]:
            raise IntervalOverlap(
                f"part intervals [{a.L[()]}, {a.R[()]}] and [{b.L[()]}, {b.R[()]}] are not disjoint and increasing"
            )
    ks = {p.k for p in parts}
    if len(ks) > 1:
        raise CreatureError(f"parts disagree on the branching parameter: {sorted(ks)}")


def _stack(parts: Sequence[Creature], root_norm: NiceNorm | None) -> Creature:
    L: dict[Path, int] = {(): parts[0].L[()]}
    R: dict[Path, int] = {(): parts[-1].R[()]}
    norms: dict[Path, NiceNorm] = {}
    if root_norm is not None:
        norms[()] = root_norm
    for i, part in enumerate(parts):
        for p in part.L:
            L[(i,) + p] = part.L[p]
            R[(i,) + p] = part.R[p]
        for p, n in part.norms.items():
            norms[(i,) + p] = n
    return Creature(parts[0].k, L, R, norms)


def build_S_H(parts: Sequence[Creature], H: NiceNorm) -> Creature:
    """Put the parts side by side above a new root normed by ``H`` on ``{0..n}``."""
    if not parts:
        raise CreatureError("need at least one part")
    k = parts[0].k
    n = len(parts) - 1
    if n < k:
        raise CreatureError(f"building needs n >= k: got {n + 1} parts for k={k}")
    if H.base != frozenset(range(n + 1)):
        raise CreatureError(f"root norm must live on {{0..{n}}}")
    verdict = validate_norm(H)
    if not verdict:
        raise CreatureError(f"root norm fails the {verdict.axiom} axiom")
    _check_increasing(parts)
    return _stack(parts, H)


def glue_S(parts: Sequence[Creature]) -> Creature:
    """Put exactly ``k`` parts above a new unnormed ``k``-splitting root."""
    if not parts:
        raise CreatureError("need k parts")
    k = parts[0].k
    if len(parts) != k:
        raise CreatureError(f"gluing needs exactly k={k} parts, got {len(parts)}")
    for i, part in enumerate(parts):
        if part.kind(()) == KSPLIT:
            raise SuccessiveRamification(f"part {i} has a k-splitting root")
    _check_increasing(parts)
    return _stack(parts, None)


@dataclass(frozen=True)
class SigmaWitness:
    member: bool
    antichain: tuple[tuple[Path, int], ...] = ()

    def __bool__(self) -> bool:
        return self.member

    def to_json(self) -> dict[str, Any]:
        return {"member": self.member, "antichain": [[list(p), i] for p, i in self.antichain]}


def _matches(t: Creature, p: Path, part: Creature) -> bool:
    """Whether the cone of ``t`` above ``p`` is a translated copy of ``part``."""
    n = len(p)
    count = 0
    for q in part.L:
        full = p + q
        if full not in t.L or t.L[full] != part.L[q] or t.R[full] != part.R[q]:
            return False
        count += 1
    # no extra nodes in the cone
    stack = [p]
    seen = 0
    while stack:
        s = stack.pop()
        seen += 1
        if seen > count:
            return False
        if s[n:] not in part.L:
            return False
        stack.extend(s + (i,) for i in t.children(s))
    if seen != count:
        return False
    for q in part.L:
        full = p + q
        a, b = t.norms.get(full), part.norms.get(q)
        if (a is None) != (b is None):
            return False
        if a is not None and not norms_agree(a, b):
            return False
    return True


def sigma_member(t: Creature, parts: Sequence[Creature], antichain: Sequence[Path] | None = None) -> SigmaWitness:
    """Whether ``t`` is built of ``parts``: some maximal antichain of ``t`` has every
    cone equal to a copy of some part.  Prefers the shallowest matches."""
    def match(p: Path) -> int | None:
        for i, part in enumerate(parts):
            if t.L[p] == part.L[()] and t.R[p] == part.R[()] and _matches(t, p, part):
                return i
        return None

    if antichain is not None:
        chosen = []
        for p in antichain:
            if p not in t.L:
                return SigmaWitness(False)
            i = match(p)
            if i is None:
                return SigmaWitness(False)
            chosen.append((tuple(p), i))
        if not _is_maximal_antichain(t, [p for p, _ in chosen]):
            return SigmaWitness(False)
        return SigmaWitness(True, tuple(chosen))

    def cover(p: Path) -> list[tuple[Path, int]] | None:
        i = match(p)
        if i is not None:
            return [(p, i)]
        kids = t.children(p)
        if not kids:
            return None
        out: list[tuple[Path, int]] = []
        for c in kids:
            sub = cover(p + (c,))
            if sub is None:
                return None
            out.extend(sub)
        return out

    found = cover(())
    if found is None:
        return SigmaWitness(False)
    return SigmaWitness(True, tuple(found))


def _is_maximal_antichain(t: Creature, F: Sequence[Path]) -> bool:
    Fs = set(F)
    for a in Fs:
        for b in Fs:
            if a != b and b[: len(a)] == a:
                return False
    for leaf in t.leaves():
        if not any(leaf[: len(a)] == a for a in Fs):
            return False
    return True
