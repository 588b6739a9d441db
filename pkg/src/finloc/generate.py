"""Seeded random instances for every module.

Every generator takes a :class:`numpy.random.Generator` and returns a value
that passes its module's validator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .creatures.creature import KSPLIT, LEAF, WIDE, Creature, Path, validate_creature, weight
from .creatures.derivation import ConditionFragment
from .creatures.norms import LogNorm, NiceNorm, TableNorm, random_table_norm
from .creatures.ops import upper_half
from .creatures.pairs import PairCondition
from .errors import InvalidInstance
from .finsets import BlockFamily, WSet
from .relations import FiniteRelationInstance

MAX_TABLE = 8


def gen_wset(rng: np.random.Generator, window: int, size: int | None = None, density: float | None = None) -> WSet:
    if size is not None:
        if size > window:
            raise InvalidInstance(f"cannot place {size} points in a window of {window}")
        pts = rng.choice(window, size=size, replace=False) if size else []
        return WSet(window, tuple(sorted(int(x) for x in pts)))
    p = rng.uniform(0.05, 0.95) if density is None else density
    return WSet(window, tuple(int(x) for x in np.flatnonzero(rng.random(window) < p)))


def gen_blockfamily(
    rng: np.random.Generator, window: int, covering: bool = True, min_size: int = 1, max_size: int | None = None
) -> BlockFamily:
    """Consecutive blocks of random sizes in ``[min_size, max_size]``; a
    non-covering family drops a random subset of them."""
    max_size = max(min_size, max_size or 2 * min_size + 2)
    if window < min_size:
        raise InvalidInstance(f"a window of {window} holds no block of size {min_size}")
    blocks = []
    pos = 0
    while True:
        size = int(rng.integers(min_size, max_size + 1))
        if pos + size > window:
            break
        blocks.append(frozenset(range(pos, pos + size)))
        pos += size
    if not covering:
        keep = rng.random(len(blocks)) < 0.6
        blocks = [b for b, kp in zip(blocks, keep) if kp] or blocks[:1]
    return BlockFamily(window, tuple(blocks), covering=covering)


def gen_relinstance(rng: np.random.Generator, n_left: int = 3, n_right: int = 3, dom_rng: bool = True) -> FiniteRelationInstance:
    for _ in range(1000):
        table = rng.random((n_left, n_right)) < 0.5
        inst = FiniteRelationInstance(
            tuple(range(n_left)), tuple(range(n_right)), tuple(tuple(bool(v) for v in row) for row in table)
        )
        if not dom_rng or inst.satisfies_dom_rng():
            return inst
    raise InvalidInstance("could not draw a relation with full domain and range")


# -- creatures ----------------------------------------------------------------------


@dataclass
class _Node:
    kind: str
    children: list["_Node"]
    norm_kind: str = "table"


def _gen_shape(rng: np.random.Generator, k: int, depth: int, parent_kind: str | None, max_width: int, log_width: int) -> _Node:
    if depth == 0:
        return _Node(LEAF, [])
    choices = [LEAF, WIDE] + ([KSPLIT] if parent_kind != KSPLIT else [])
    probs = {LEAF: 0.25, WIDE: 0.5, KSPLIT: 0.25}
    if parent_kind is None:
        choices = [c for c in choices if c != LEAF]
    p = np.array([probs[c] for c in choices])
    kind = choices[int(rng.choice(len(choices), p=p / p.sum()))]
    if kind == LEAF:
        return _Node(LEAF, [])
    if kind == KSPLIT:
        return _Node(KSPLIT, [_gen_shape(rng, k, depth - 1, KSPLIT, max_width, log_width) for _ in range(k)])
    if log_width > 0 and rng.random() < 0.15:
        width = int(rng.integers(k + 1, log_width + 1))
        return _Node(WIDE, [_Node(LEAF, []) for _ in range(width)], "log")
    width = int(rng.integers(max(k + 1, 2), max_width + 1))
    return _Node(WIDE, [_gen_shape(rng, k, depth - 1, WIDE, max_width, log_width) for _ in range(width)])


def _layout(
    rng: np.random.Generator,
    node: _Node,
    path: Path,
    pos: int,
    L: dict,
    R: dict,
    norms: dict,
    max_gap: int,
) -> int:
    if node.kind == LEAF:
        x = pos + int(rng.integers(0, max_gap + 1))
        L[path] = R[path] = x
        return x + 1
    start = pos + int(rng.integers(0, max_gap + 1))
    cur = start
    first = None
    for i, child in enumerate(node.children):
        cur = _layout(rng, child, path + (i,), cur, L, R, norms, max_gap)
        if first is None:
            first = L[path + (i,)]
    L[path] = min(start, first)  # type: ignore[type-var]
    R[path] = cur - 1 + int(rng.integers(0, max_gap + 1))
    if node.kind == WIDE:
        base = frozenset(range(len(node.children)))
        if node.norm_kind == "log" or len(base) > MAX_TABLE:
            norms[path] = LogNorm(base)
        else:
            norms[path] = random_table_norm(base, rng)
    return R[path] + 1


def gen_creature(
    rng: np.random.Generator,
    k: int = 2,
    depth: int = 2,
    start: int = 0,
    max_width: int = MAX_TABLE,
    log_width: int = 0,
    max_gap: int = 2,
) -> Creature:
    """A random valid creature with table norms on bases of at most ``max_width``
    labels, and occasionally a log-normed node with up to ``log_width`` leaves."""
    shape = _gen_shape(rng, k, depth, None, max_width, log_width)
    L: dict = {}
    R: dict = {}
    norms: dict = {}
    _layout(rng, shape, (), start, L, R, norms, max_gap)
    t = Creature(k, L, R, norms)
    validate_creature(t)
    return t


def gen_heavy_creature(
    rng: np.random.Generator, k: int, target_weight: int, shape: str = "wide-root", start: int = 0, max_gap: int = 3
) -> Creature:
    """A log-normed creature of weight exactly ``target_weight``.

    ``wide-root``: a root with ``2**w`` successors, each a leaf or a
    ``k``-splitting node over ``k`` leaves.  ``k-root``: a ``k``-splitting root
    over ``k`` wide nodes of that kind with leaf successors.
    """
    width = 2**target_weight
    L: dict[Path, int] = {}
    R: dict[Path, int] = {}
    norms: dict[Path, NiceNorm] = {}
    children: dict[Path, tuple[int, ...]] = {}
    pos = start
    gaps = rng.integers(0, max_gap + 1, size=4 * width * max(k, 1) + 8)
    gi = 0

    def step() -> int:
        nonlocal gi
        gi += 1
        return int(gaps[gi - 1])

    def wide(path: Path, allow_k: bool) -> None:
        nonlocal pos
        pos += step()
        L[path] = pos
        kinds = rng.random(width) < (0.2 if allow_k else 0.0)
        for i in range(width):
            q = path + (i,)
            pos += step()
            if kinds[i]:
                L[q] = pos
                for j in range(k):
                    pos += step()
                    L[q + (j,)] = R[q + (j,)] = pos
                    children[q + (j,)] = ()
                    pos += 1
                R[q] = pos - 1
                children[q] = tuple(range(k))
            else:
                L[q] = R[q] = pos
                children[q] = ()
                pos += 1
        R[path] = pos - 1
        children[path] = tuple(range(width))
        norms[path] = LogNorm(frozenset(range(width)))

    if shape == "wide-root":
        wide((), True)
    elif shape == "k-root":
        L[()] = pos
        for i in range(k):
            wide((i,), False)
        R[()] = pos - 1
        children[()] = tuple(range(k))
    else:
        raise InvalidInstance(f"unknown creature shape {shape!r}")
    t = Creature._trusted(k, L, R, norms, children)
    assert weight(t) == target_weight
    return t


def random_B(rng: np.random.Generator, lo: int, hi: int, density: float | None = None, tail: int = 2) -> WSet:
    """Random points in ``[lo, hi)`` plus ``tail`` points beyond ``hi``."""
    p = rng.choice([0.02, 0.1, 0.3, 0.6]) if density is None else density
    pts = (np.flatnonzero(rng.random(hi - lo) < p) + lo).tolist()
    pts += [hi + 1 + 2 * i for i in range(tail)]
    return WSet(hi + 2 * tail + 1, tuple(sorted(set(int(x) for x in pts))))


def random_refinement(rng: np.random.Generator, t: Creature, drop: float = 0.3) -> Creature:
    """Drop random successors of wide nodes while keeping more than ``k`` of them
    and a positive norm on what is kept."""
    from .creatures.creature import restrict_creature

    keep: set[Path] = set()
    stack: list[Path] = [()]
    while stack:
        p = stack.pop()
        keep.add(p)
        kids = list(t.children(p))
        if len(kids) > t.k:
            n = t.norms[p]
            chosen = kids
            for _ in range(10):
                mask = rng.random(len(kids)) >= drop
                cand = [c for c, m in zip(kids, mask) if m]
                if len(cand) > t.k and n(frozenset(cand)) > 0:
                    chosen = cand
                    break
            kids = chosen
        stack.extend(p + (c,) for c in kids)
    return restrict_creature(t, keep)


def gen_fragment(
    rng: np.random.Generator, k: int = 2, count: int = 3, depth: int = 2, w_size: int = 2, max_width: int = 5
) -> ConditionFragment:
    w = sorted(int(x) for x in rng.choice(10, size=w_size, replace=False)) if w_size else []
    pos = (max(w) + 1 if w else 0) + int(rng.integers(0, 3))
    creatures = []
    for _ in range(count):
        t = gen_creature(rng, k, depth, start=pos, max_width=max_width)
        creatures.append(t)
        pos = t.R[()] + 1 + int(rng.integers(0, 3))
    return ConditionFragment(frozenset(w), tuple(creatures))


def gen_pair_condition(rng: np.random.Generator, universe: int = 12, families: int = 2) -> PairCondition:
    u = [int(x) for x in np.flatnonzero(rng.random(universe) < 0.3)]
    KK = []
    for _ in range(families):
        perm = rng.permutation(universe)
        npairs = int(rng.integers(1, universe // 2 + 1))
        KK.append([[int(perm[2 * i]), int(perm[2 * i + 1])] for i in range(npairs)])
    return PairCondition.of(u, KK)


def gen_instance(kind: str, rng: np.random.Generator, window: int = 40, **opts: Any) -> dict[str, Any]:
    """JSON form of a random instance of the named kind."""
    if kind == "wset":
        return gen_wset(rng, window, opts.get("size")).to_json()
    if kind == "blockfamily":
        return gen_blockfamily(rng, window, opts.get("covering", True), opts.get("min_size", 1)).to_json()
    if kind == "creature":
        return gen_creature(rng, opts.get("k", 2), opts.get("depth", 2)).to_json()
    if kind == "fragment":
        return gen_fragment(rng, opts.get("k", 2), opts.get("count", 2)).to_json()
    if kind == "relinstance":
        return gen_relinstance(rng, opts.get("n_left", 3), opts.get("n_right", 3)).to_json()
    raise InvalidInstance(f"unknown instance kind {kind!r}")


__all__ = [
    "gen_blockfamily",
    "gen_creature",
    "gen_fragment",
    "gen_heavy_creature",
    "gen_instance",
    "gen_pair_condition",
    "gen_relinstance",
    "gen_wset",
    "random_B",
    "random_refinement",
    "upper_half",
    "TableNorm",
]
