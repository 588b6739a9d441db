"""Derivations in the closure of a list of creatures under refining, taking
the upper half and building, plus condition fragments and their order."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from ..errors import CreatureError, InvalidInstance
from .creature import Creature, Path, contribution, creatures_equal, signature, validate_creature, weight
from .ops import refines, sigma_member, upper_half

PART, UPPER_HALF, REFINE, BUILD = "part", "upper_half", "refine", "build"


@dataclass(frozen=True, eq=False)
class Derivation:
    """One node of a derivation tree whose leaves are indices into the parts."""

    op: str
    result: Creature
    part: int | None = None
    sources: tuple["Derivation", ...] = ()
    antichain: tuple[Path, ...] | None = None

    @property
    def depth(self) -> int:
        if self.op == PART:
            return 0
        return 1 + max(s.depth for s in self.sources)

    @property
    def steps(self) -> int:
        if self.op == PART:
            return 0
        return 1 + sum(s.steps for s in self.sources)

    def parts_used(self) -> set[int]:
        if self.op == PART:
            return {self.part}  # type: ignore[arg-type]
        out: set[int] = set()
        for s in self.sources:
            out |= s.parts_used()
        return out

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"op": self.op}
        if self.op == PART:
            out["part"] = self.part
        else:
            out["sources"] = [s.to_json() for s in self.sources]
        if self.antichain is not None:
            out["antichain"] = [list(p) for p in self.antichain]
        if self.op in (REFINE, BUILD):
            out["result"] = self.result.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any], parts: Sequence[Creature]) -> "Derivation":
        op = data["op"]
        if op == PART:
            i = int(data["part"])
            if not 0 <= i < len(parts):
                raise InvalidInstance(f"derivation refers to part {i} of {len(parts)}")
            return cls(PART, parts[i], i)
        sources = tuple(cls.from_json(s, parts) for s in data["sources"])
        if op == UPPER_HALF:
            return cls(UPPER_HALF, upper_half(sources[0].result), None, sources)
        antichain = None
        if data.get("antichain") is not None:
            antichain = tuple(tuple(p) for p in data["antichain"])
        return cls(op, Creature.from_json(data["result"]), None, sources, antichain)


def verify_derivation(d: Derivation, parts: Sequence[Creature]) -> bool:
    """Re-check every step from scratch."""
    try:
        validate_creature(d.result)
    except CreatureError:
        return False
    if d.op == PART:
        return d.part is not None and 0 <= d.part < len(parts) and creatures_equal(d.result, parts[d.part])
    if not d.sources or not all(verify_derivation(s, parts) for s in d.sources):
        return False
    if d.op == UPPER_HALF:
        return len(d.sources) == 1 and creatures_equal(d.result, upper_half(d.sources[0].result))
    if d.op == REFINE:
        return len(d.sources) == 1 and refines(d.sources[0].result, d.result)
    if d.op == BUILD:
        wit = sigma_member(d.result, [s.result for s in d.sources], d.antichain)
        return bool(wit)
    return False


def substitute(d: Derivation, replacement: Mapping[int, Derivation]) -> Derivation:
    """Replace every ``part i`` leaf by ``replacement[i]`` (which must derive the same creature)."""
    if d.op == PART:
        return replacement[d.part]  # type: ignore[index]
    return Derivation(d.op, d.result, None, tuple(substitute(s, replacement) for s in d.sources), d.antichain)


def shift_parts(d: Derivation, offset: int) -> Derivation:
    if d.op == PART:
        return Derivation(PART, d.result, d.part + offset)  # type: ignore[operator]
    return Derivation(d.op, d.result, None, tuple(shift_parts(s, offset) for s in d.sources), d.antichain)


@dataclass(frozen=True)
class StarVerdict:
    derivable: bool | None  # True with a certificate, None when the cap was hit
    certificate: Derivation | None = None

    @property
    def label(self) -> str:
        return "derivable" if self.derivable else "not-found-within-cap"

    def __bool__(self) -> bool:
        return bool(self.derivable)


def _uh_chain(part_d: Derivation, j: int) -> Derivation:
    d = part_d
    for _ in range(j):
        d = Derivation(UPPER_HALF, upper_half(d.result), None, (d,))
    return d


def sigma_star_member(t: Creature, parts: Sequence[Creature], depth_cap: int = 3) -> StarVerdict:
    """Search backwards for a derivation of ``t`` of depth at most ``depth_cap``.

    Tried in order: ``t`` is a part; ``t`` is (a refinement of) an iterated
    upper half of a part; ``t`` is built from cones above a maximal antichain,
    each derivable with one step less.  A miss is reported as "not found
    within the cap", never as a definite no.
    """
    leaves = [Derivation(PART, p, i) for i, p in enumerate(parts)]
    memo: dict[tuple, Derivation | None] = {}

    def search(c: Creature, depth: int) -> Derivation | None:
        key = (signature(c), depth)
        if key in memo:
            return memo[key]
        memo[key] = None
        found = _search(c, depth)
        memo[key] = found
        return found

    def _search(c: Creature, depth: int) -> Derivation | None:
        for leaf in leaves:
            if creatures_equal(c, leaf.result):
                return leaf
        if depth <= 0:
            return None
        cont = contribution(c)
        for leaf in leaves:
            if not cont <= contribution(leaf.result) or c.k != leaf.result.k:
                continue
            for j in range(depth + 1):
                chain = _uh_chain(leaf, j)
                if j and creatures_equal(c, chain.result):
                    return chain
                if j < depth and refines(chain.result, c):
                    return Derivation(REFINE, c, None, (chain,))
        # building from cones above an antichain other than the root itself
        union = frozenset().union(*(contribution(p) for p in parts)) if parts else frozenset()
        if not cont <= union:
            return None

        def cover(p: Path) -> list[tuple[Path, Derivation]] | None:
            if p:
                sub = search(c.cone(p), depth - 1)
                if sub is not None:
                    return [(p, sub)]
            kids = c.children(p)
            if not kids:
                return None
            out: list[tuple[Path, Derivation]] = []
            for i in kids:
                got = cover(p + (i,))
                if got is None:
                    return None
                out.extend(got)
            return out

        got = cover(())
        if got is None:
            return None
        return Derivation(BUILD, c, None, tuple(d for _, d in got), tuple(p for p, _ in got))

    d = search(t, depth_cap)
    if d is None:
        return StarVerdict(None)
    return StarVerdict(True, d)


# -- condition fragments --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConditionFragment:
    """A finite set ``w`` followed by creatures whose root intervals increase."""

    w: frozenset[int]
    creatures: tuple[Creature, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", frozenset(self.w))
        object.__setattr__(self, "creatures", tuple(self.creatures))
        prev = max(self.w, default=-1)
        for i, t in enumerate(self.creatures):
            lo, hi = t.span()
            if not prev < lo <= hi:
                raise InvalidInstance(f"creature {i} starts at {lo}, not after {prev}")
            prev = hi
        ws = [weight(t) for t in self.creatures]
        meta = dict(self.metadata)
        meta.setdefault("weights_increasing", all(a < b for a, b in zip(ws, ws[1:])))
        object.__setattr__(self, "metadata", meta)

    def __len__(self) -> int:
        return len(self.creatures)

    def to_json(self) -> dict[str, Any]:
        return {"w": sorted(self.w), "creatures": [t.to_json() for t in self.creatures]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ConditionFragment":
        return cls(frozenset(data.get("w", [])), tuple(Creature.from_json(c) for c in data["creatures"]))


@dataclass(frozen=True)
class OrderVerdict:
    holds: bool | None  # None: no grouping found, but some derivation search hit its cap
    n: tuple[int, ...] = ()
    derivations: tuple[Derivation, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.holds)

    def to_json(self) -> dict[str, Any]:
        return {
            "holds": self.holds,
            "n": list(self.n),
            "derivations": [d.to_json() for d in self.derivations],
        }


def fragment_leq(
    p: ConditionFragment,
    q: ConditionFragment,
    hints: Mapping[int, Derivation] | None = None,
    depth_cap: int = 3,
) -> OrderVerdict:
    """Whether ``q`` extends ``p``.

    Looks for ``n_0 < n_1 < ... < n_m <= len(p)`` with
    ``w_p ⊆ w_q ⊆ w_p ∪ cont(p_0) ∪ ... ∪ cont(p_{n_0 - 1})`` and each
    ``q_i`` derivable from ``p_{n_i}, ..., p_{n_{i+1} - 1}``.  A hint for
    ``q_i`` is a derivation whose part indices are absolute positions in
    ``p``; it is verified and fixes that group.
    """
    hints = dict(hints or {})
    m = len(q)
    P = len(p)
    conts = [contribution(t) for t in p.creatures]
    capped = False
    cache: dict[tuple[int, int, int], Derivation | None] = {}

    def derive(i: int, a: int, b: int) -> Derivation | None:
        nonlocal capped
        key = (i, a, b)
        if key in cache:
            return cache[key]
        target = q.creatures[i]
        out = None
        if i in hints:
            h = hints[i]
            if h.parts_used() <= set(range(a, b)) and creatures_equal(h.result, target):
                if verify_derivation(h, p.creatures):
                    out = shift_parts(h, -a)
        elif contribution(target) <= frozenset().union(*conts[a:b]):
            v = sigma_star_member(target, p.creatures[a:b], depth_cap)
            if v.derivable:
                out = v.certificate
            else:
                capped = True
        cache[key] = out
        return out

    if not p.w <= q.w:
        return OrderVerdict(False)
    for n0 in range(P + 1):
        allowed = p.w.union(*conts[:n0])
        if not q.w <= allowed:
            continue
        # reach[i] maps an end index a to (previous a, derivation) for the first i groups
        reach: list[dict[int, tuple[int, Derivation | None]]] = [{n0: (-1, None)}]
        for i in range(m):
            nxt: dict[int, tuple[int, Derivation | None]] = {}
            for a in sorted(reach[-1]):
                for b in range(a + 1, P + 1):
                    if b in nxt:
                        continue
                    d = derive(i, a, b)
                    if d is not None:
                        nxt[b] = (a, d)
            reach.append(nxt)
            if not nxt:
                break
        if len(reach) == m + 1 and reach[-1]:
            end = min(reach[-1])
            cuts = [end]
            ders = []
            for i in range(m, 0, -1):
                a, d = reach[i][cuts[-1]]
                ders.append(d)
                cuts.append(a)
            cuts.reverse()
            ders.reverse()
            return OrderVerdict(True, tuple(cuts), tuple(ders))  # type: ignore[arg-type]
    return OrderVerdict(None if capped else False)


def compose_orders(first: OrderVerdict, second: OrderVerdict) -> OrderVerdict:
    """From certificates for ``p <= q`` and ``q <= r``, a certificate for ``p <= r``.

    Every part leaf ``j`` in a derivation of ``r_i`` stands for ``q_j``; it
    is replaced by the derivation of ``q_j`` from its own group of ``p``.
    """
    if not (first.holds and second.holds):
        raise InvalidInstance("both verdicts must hold with certificates")
    n, n2 = first.n, second.n
    cuts = tuple(n[j] for j in n2)
    ders = []
    for i, d in enumerate(second.derivations):
        base_q = n2[i]
        mapping = {}
        for j in d.parts_used():
            qj = base_q + j
            mapping[j] = shift_parts(first.derivations[qj], n[qj] - n[base_q])
        ders.append(substitute(d, mapping))
    return OrderVerdict(True, cuts, tuple(ders))
