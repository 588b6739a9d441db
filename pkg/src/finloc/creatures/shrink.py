"""Shrinking a creature so that its contribution never fills ``k + 1``
consecutive gaps of a given set ``B`` with two points each.

The recursion works top-down on the original tree and only decides which
nodes to keep, so it never copies subtrees.  Two node kinds need work:

* a wide node (more than ``k`` successors) keeps either the successors whose
  whole interval sits in a single ``B``-gap of one parity, or every fourth
  successor among those whose interval crosses a point of ``B``; in the
  second case successive kept successors are separated by empty gaps, so the
  recursion can treat them independently;
* a ``k``-splitting node first narrows each wide successor to a set that sits
  in one closed gap or is fenced off from its siblings by empty gaps, then
  treats that successor as a wide node.

Norm losses are at most 3 or 7 at a wide node and 7 + 7 below a
``k``-splitting node, which is where the overall bound of 14 comes from.
Results are re-checked independently by :func:`shrink_contract`.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Sequence

from ..errors import (
    NormAxiomViolation,
    SparsityViolation,
    WeightTooSmall,
    WindowTooShort,
)
from ..finsets import WSet
from .creature import KSPLIT, LEAF, WIDE, Creature, Path, contribution, restrict_creature, weight
from .derivation import ConditionFragment
from .ops import refines

MAX_LOSS = 14
MIN_WEIGHT = 15


@dataclass
class ShrinkTrace:
    steps: list[dict[str, Any]] = field(default_factory=list)

    def add(self, path: Path, case: str, **info: Any) -> None:
        self.steps.append({"path": list(path), "case": case, **info})


class _Shrinker:
    def __init__(self, t: Creature, B: Sequence[int]) -> None:
        self.t = t
        self.k = t.k
        # a virtual point below everything: gaps of B are gaps of this list too,
        # so sparsity for the longer list implies sparsity for B
        self.pts = [-1] + list(B)
        self.keep: set[Path] = set()
        self.trace = ShrinkTrace()
        self.wmin = self._cone_weights()

    def _cone_weights(self) -> dict[Path, float]:
        t = self.t
        out: dict[Path, float] = {}
        inf = float("inf")
        for p in sorted(t.L, key=len, reverse=True):
            kids = t.children(p)
            if not kids:
                out[p] = inf
                continue
            w = min(out[p + (c,)] for c in kids)
            if len(kids) > self.k:
                w = min(w, t.norms[p](frozenset(kids)))
            out[p] = w
        return out

    def gap(self, x: int) -> int:
        return bisect_right(self.pts, x) - 1

    def keep_subtree(self, p: Path) -> None:
        t = self.t
        if not t.children(p):
            self.keep.add(p)
            return
        stack = [p]
        while stack:
            s = stack.pop()
            self.keep.add(s)
            stack.extend(s + (c,) for c in t.children(s))

    def norm(self, p: Path, labels) -> int:
        return self.t.norms[p](frozenset(labels))

    # -- dispatch --------------------------------------------------------------

    def process(self, p: Path) -> None:
        kind = self.t.kind(p)
        if kind == LEAF:
            self.keep.add(p)
        elif kind == KSPLIT:
            self.ksplit(p)
        else:
            self.wide(p, list(self.t.children(p)), self.wmin[p])

    # -- wide nodes ------------------------------------------------------------

    def wide(self, p: Path, cand: list[int], W: float) -> None:
        t, k = self.t, self.k
        alpha: tuple[list[int], list[int]] = ([], [])
        beta: list[int] = []
        for c in cand:
            q = p + (c,)
            gl, gr = self.gap(t.L[q]), self.gap(t.R[q])
            if gl == gr:
                alpha[gl % 2].append(c)
            else:
                beta.append(c)
        for parity in (0, 1):
            cls = alpha[parity]
            if len(cls) > k and self.norm(p, cls) >= W - 3:
                self.keep.add(p)
                for c in cls:
                    self.keep_subtree(p + (c,))
                self.trace.add(p, "single-gap", parity=parity, kept=len(cls), norm=self.norm(p, cls))
                return
        beta.sort(key=lambda c: t.L[p + (c,)])
        for j in range(4):
            quarter = beta[j::4]
            if len(quarter) > k and self.norm(p, quarter) >= W - 7:
                self.keep.add(p)
                self.trace.add(p, "crossing-quarter", quarter=j, kept=len(quarter), norm=self.norm(p, quarter))
                for c in quarter:
                    self.process(p + (c,))
                return
        raise NormAxiomViolation(
            f"no successor class at {p} keeps norm >= {W} - 7; the norm is not nice"
        )

    # -- k-splitting nodes -----------------------------------------------------

    def ksplit(self, p: Path) -> None:
        t = self.t
        self.keep.add(p)
        W = self.wmin[p]
        for c in t.children(p):
            q = p + (c,)
            kind = t.kind(q)
            if kind == LEAF:
                self.keep.add(q)
            elif kind == WIDE:
                A = self.fence(q, W)
                Wq = min([self.norm(q, A)] + [self.wmin[q + (a,)] for a in A])
                self.wide(q, A, Wq)
            else:  # pragma: no cover - excluded by creature validation
                raise NormAxiomViolation(f"two successive k-splitting nodes at {p}")

    def fence(self, q: Path, W: float) -> list[int]:
        """A successor set of ``q`` lying in one closed gap of ``B``, or inside
        ``[B_m0, B_m1]`` with every sibling of ``q`` clear of ``[B_{m0-1}, B_{m1+1}]``."""
        t, k, pts = self.t, self.k, self.pts
        kids = list(t.children(q))
        full = self.norm(q, kids)
        inside: dict[int, list[int]] = {}
        crossing: list[int] = []
        for s in kids:
            L, R = t.L[q + (s,)], t.R[q + (s,)]
            g = self.gap(L)
            if g + 1 >= len(pts):
                raise WindowTooShort(f"B has no point after {L}")
            if R <= pts[g + 1]:
                inside.setdefault(g, []).append(s)
            else:
                crossing.append(s)
        A0 = [s for g in sorted(inside) for s in inside[g]]
        if self.norm(q, A0) >= full - 1:
            groups = [inside[g] for g in sorted(inside)]
            chosen = None
            for side in ("low", "high", "low", "high"):
                if len(groups) == 1:
                    break
                G = groups[0] if side == "low" else groups[-1]
                rest = [s for g in groups for s in g]
                if len(G) > k and self.norm(q, G) >= self.norm(q, rest) - 1:
                    chosen = G
                    break
                groups = groups[1:] if side == "low" else groups[:-1]
            if chosen is not None:
                A, how = chosen, "one-gap"
            elif len(groups) == 1:
                A, how = groups[0], "one-gap"
            else:
                A, how = [s for g in groups for s in g], "separated"
        else:
            crossing.sort(key=lambda s: t.L[q + (s,)])
            A, how = crossing[2:-2], "trimmed-crossing"
        if len(A) <= k or self.norm(q, A) < W - 7:
            raise NormAxiomViolation(f"no fenced successor set at {q} keeps norm >= {W} - 7")
        self.trace.add(q, how, kept=len(A), norm=self.norm(q, A))
        return A


def _check_inputs(t: Creature, B: WSet | Sequence[int], min_weight: int) -> list[int]:
    pts = list(B.elements if isinstance(B, WSet) else B)
    w = weight(t)
    if w < min_weight:
        raise WeightTooSmall(f"weight {w} is below the required {min_weight}")
    beyond = len(pts) - bisect_right(pts, t.R[()])
    if beyond < 2:
        raise WindowTooShort(f"B needs at least 2 points beyond {t.R[()]}, has {beyond}")
    return pts


def shrink_creature_traced(
    t: Creature, B: WSet | Sequence[int], min_weight: int = MIN_WEIGHT
) -> tuple[Creature, ShrinkTrace]:
    pts = _check_inputs(t, B, min_weight)
    s = _Shrinker(t, pts)
    s.process(())
    return restrict_creature(t, s.keep), s.trace


def shrink_creature(t: Creature, B: WSet | Sequence[int], min_weight: int = MIN_WEIGHT) -> Creature:
    """A refinement of ``t`` losing at most 14 in weight whose contribution meets,
    among any ``k + 1`` consecutive gaps of ``B``, some gap in fewer than 2 points."""
    return shrink_creature_traced(t, B, min_weight)[0]


# -- independent checks -------------------------------------------------------


def gap_fill(points: Sequence[int], B: Sequence[int]) -> list[int]:
    """``|points ∩ [B_j, B_{j+1})|`` for every gap ``j`` of ``B``."""
    pts = sorted(points)
    return [bisect_left(pts, b) - bisect_left(pts, a) for a, b in zip(B, B[1:])]


def first_full_run(points: Sequence[int], B: Sequence[int], run: int, start_after: int | None = None) -> int | None:
    """Least ``n`` such that the ``run`` gaps from ``n`` all hold 2 or more points."""
    fill = gap_fill(points, B)
    streak = 0
    for j, c in enumerate(fill):
        if start_after is not None and B[j] <= start_after:
            streak = 0
            continue
        streak = streak + 1 if c >= 2 else 0
        if streak >= run:
            return j - run + 1
    return None


@dataclass(frozen=True)
class ShrinkContract:
    refines: bool
    weight_ok: bool
    sparse: bool
    weight_before: int
    weight_after: int
    violation: int | None = None

    def __bool__(self) -> bool:
        return self.refines and self.weight_ok and self.sparse

    def to_json(self) -> dict[str, Any]:
        return {
            "refines": self.refines,
            "weight_ok": self.weight_ok,
            "sparse": self.sparse,
            "weight_before": self.weight_before,
            "weight_after": self.weight_after,
            "violation": self.violation,
        }


def shrink_contract(t: Creature, t2: Creature, B: WSet | Sequence[int], max_loss: int = MAX_LOSS) -> ShrinkContract:
    pts = list(B.elements if isinstance(B, WSet) else B)
    w0, w1 = weight(t), weight(t2)
    bad = first_full_run(sorted(contribution(t2)), pts, t.k + 1)
    return ShrinkContract(refines(t, t2), w1 >= w0 - max_loss, bad is None, w0, w1, bad)


# -- fragments --------------------------------------------------------------------


@dataclass(frozen=True)
class FragmentShrink:
    fragment: ConditionFragment
    selector_check: str  # "exhaustive" or "full-contribution"
    sparse: bool


def shrink_condition(
    p: ConditionFragment, B: WSet | Sequence[int], min_weight: int = MIN_WEIGHT + 1, selector_limit: int = 16
) -> FragmentShrink:
    """Shrink every creature of ``p`` and check that no choice of contributions
    fills ``k + 1`` consecutive ``B``-gaps lying above ``max w``."""
    pts = list(B.elements if isinstance(B, WSet) else B)
    for i, t in enumerate(p.creatures):
        if weight(t) < min_weight:
            raise WeightTooSmall(f"creature {i} has weight {weight(t)} < {min_weight}")
    for i, (a, b) in enumerate(zip(p.creatures, p.creatures[1:])):
        between = bisect_left(pts, b.L[()]) - bisect_left(pts, a.R[()])
        if between <= 2:
            raise SparsityViolation(
                f"only {between} points of B between creatures {i} and {i + 1}; need more than 2"
            )
    shrunk = tuple(shrink_creature(t, pts, min_weight=0) for t in p.creatures)
    q = ConditionFragment(p.w, shrunk)
    top = max(p.w, default=-1)
    k = max((t.k for t in shrunk), default=1)
    conts = [sorted(contribution(t)) for t in shrunk]
    total = sum(len(c) for c in conts)
    if total <= selector_limit:
        mode = "exhaustive"
        ok = True
        flat = [x for c in conts for x in c]
        for bits in product((0, 1), repeat=len(flat)):
            chosen = sorted(p.w) + [x for x, b in zip(flat, bits) if b]
            if first_full_run(chosen, pts, k + 1, start_after=top) is not None:
                ok = False
                break
    else:
        # subsets only thin gaps out, so the full contribution is the worst selector
        mode = "full-contribution"
        chosen = sorted(p.w) + [x for c in conts for x in c]
        ok = first_full_run(chosen, pts, k + 1, start_after=top) is None
    return FragmentShrink(q, mode, ok)
