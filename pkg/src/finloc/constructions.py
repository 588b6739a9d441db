"""Witness-building pipelines: branch complements, escaping functions,
interval partitions from a growth bound, and the run-building pipeline for
``S_+^φ``.

Anything that would come from a model-theoretic hypothesis (an unbounded
set, a function guessing another infinitely often) is an explicit input, so
callers can supply perfect, partial or adversarial oracles.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .errors import (
    DensityInsufficient,
    DomainError,
    InvalidInstance,
    UndecidablePrefix,
    WindowTooShort,
)
from .finsets import BlockFamily, IntervalPartition, WSet
from .relations import check_phi

# -- coding finite 0/1 sequences by naturals ---------------------------------


def encode(bits: Sequence[int]) -> int:
    """Length-then-lexicographic code: () -> 0, (0) -> 1, (1) -> 2, (0,0) -> 3, ..."""
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise InvalidInstance(f"bits must be 0 or 1, got {b}")
        value = 2 * value + b
    return (1 << len(bits)) - 1 + value


def decode(code: int) -> tuple[int, ...]:
    if code < 0:
        raise InvalidInstance(f"codes are natural numbers, got {code}")
    length = (code + 1).bit_length() - 1
    value = code + 1 - (1 << length)
    return tuple((value >> (length - 1 - i)) & 1 for i in range(length))


@dataclass(frozen=True)
class BranchPrefix:
    """A known initial segment of a branch through the binary tree."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InvalidInstance("branch bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def is_initial_segment(self, s: Sequence[int]) -> bool:
        """Whether ``s`` is an initial segment of the branch."""
        if len(s) > len(self.bits):
            raise UndecidablePrefix(
                f"sequence of length {len(s)} cannot be compared with a prefix of length {len(self.bits)}"
            )
        return tuple(s) == self.bits[: len(s)]

    def chain_codes(self, up_to_length: int | None = None) -> list[int]:
        n = len(self.bits) if up_to_length is None else up_to_length
        return [encode(self.bits[:i]) for i in range(min(n, len(self.bits)) + 1)]

    def to_json(self) -> dict[str, Any]:
        return {"bits": list(self.bits)}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "BranchPrefix":
        return cls(tuple(data["bits"]))


def branch_complement(x: BranchPrefix, horizon: int) -> WSet:
    """Codes below ``horizon`` of finite sequences that are not initial segments of ``x``."""
    return WSet(horizon, tuple(c for c in range(horizon) if not x.is_initial_segment(decode(c))))


@dataclass(frozen=True)
class LematTrace:
    u: tuple[int, ...]
    d: tuple[int, ...]
    selected_indices: tuple[int, ...]
    F_sets: tuple[frozenset[int], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "u": list(self.u),
            "d": list(self.d),
            "selected_indices": list(self.selected_indices),
            "F_sets": [sorted(s) for s in self.F_sets],
        }


@dataclass(frozen=True)
class LematResult:
    index: int | None
    trace: LematTrace | None = None

    def to_json(self) -> dict[str, Any]:
        return {"index": self.index, "trace": None if self.trace is None else self.trace.to_json()}


def lemat_witness(x: BranchPrefix, F: BlockFamily, k: int) -> LematResult:
    """Least block with at least ``k + 1`` codes off the branch of ``x``.

    When every block on the window keeps at most ``k`` points off the
    branch, the returned trace records the per-block maximal and minimal
    lengths, a subsequence of blocks whose length ranges are separated and
    the projected sets, each of size at most ``k + 1``, that would pin the
    branch down to finitely many candidates.
    """
    decoded = []
    for n, block in enumerate(F.blocks):
        if len(block) <= k:
            raise InvalidInstance(f"block {n} has {len(block)} <= k={k} elements")
        seqs = [decode(c) for c in sorted(block)]
        off = sum(not x.is_initial_segment(s) for s in seqs)
        if off >= k + 1:
            return LematResult(n)
        decoded.append(seqs)
    u = tuple(max(len(s) for s in seqs) for seqs in decoded)
    d = tuple(min(len(s) for s in seqs) for seqs in decoded)
    selected: list[int] = []
    for n in range(len(decoded)):
        if not selected or d[n] > u[selected[-1]]:
            selected.append(n)
    F_sets = tuple(frozenset(encode(s[: d[n]]) for s in decoded[n]) for n in selected)
    return LematResult(None, LematTrace(u, d, tuple(selected), F_sets))


# -- escaping functions and interval partitions ------------------------------


def partition_to_escaping_g(F: BlockFamily) -> list[int]:
    """``g(min K) = 1 + max K`` for every block ``K``, and 0 elsewhere."""
    if not F.covering:
        raise InvalidInstance("escaping function needs a covering family")
    if not F.blocks:
        return []
    top = max(max(b) for b in F.blocks)
    g = [0] * (top + 1)
    for b in F.blocks:
        g[min(b)] = 1 + max(b)
    return g


def g_to_interval_partition(g: Sequence[int], k: int, length: int) -> IntervalPartition:
    """Cut points ``c_0 = 0, c_{n+1} = k + 1 + c_n + g(c_n)``."""
    cuts = [0]
    for _ in range(length):
        c = cuts[-1]
        if c >= len(g):
            raise DomainError(f"g is defined on [0, {len(g)}) but the recurrence needs g({c})")
        cuts.append(k + 1 + c + g[c])
    return IntervalPartition(tuple(cuts))


def crowding_function(X: WSet, k: int, domain: int) -> list[int]:
    """``f(n)`` = least ``m > n`` with more than ``2k`` points of ``X`` in ``[n, m)``."""
    els = X.elements
    out = []
    for n in range(domain):
        i = bisect_left(els, n) + 2 * k
        if i >= len(els):
            raise WindowTooShort(f"fewer than {2 * k + 1} points of X at or after {n}")
        out.append(els[i] + 1)
    return out


def spread_sequence(f: Sequence[int], length: int) -> list[int]:
    """``f'(0) = 0`` and ``f'(n+1) = f(f'(n)) + 2``, so ``f(f'(n)) + 1 < f'(n+1)``."""
    out = [0]
    while len(out) < length:
        c = out[-1]
        if c >= len(f):
            raise DomainError(f"f is defined on [0, {len(f)}) but the sequence needs f({c})")
        out.append(f[c] + 2)
    return out[:length]


def meabou_partition(
    X: WSet, F: BlockFamily, g: Sequence[Iterable[int]]
) -> BlockFamily:
    """Keep every chosen ``g(n) ⊆ K_n`` as a block and pair off everything else.

    Leftovers ``K_n \\ g(n)`` are paired in increasing order across block
    boundaries; an odd one out joins the last pair.  A single leftover with
    no pair to join is added to the last ``g``-block that already meets ``X``
    (or the last ``g``-block), which keeps every block of size at least 2.
    """
    if len(g) != len(F):
        raise InvalidInstance(f"need one chosen set per block: {len(g)} sets for {len(F)} blocks")
    chosen = []
    for n, (K, G) in enumerate(zip(F.blocks, g)):
        G = frozenset(G)
        if not G <= K:
            raise InvalidInstance(f"g({n}) is not a subset of block {n}")
        if len(G) < 2:
            raise InvalidInstance(f"g({n}) has {len(G)} < 2 elements")
        chosen.append(G)
    leftovers = sorted(set().union(*F.blocks) - set().union(*chosen)) if chosen else []
    pairs = [frozenset(leftovers[i : i + 2]) for i in range(0, len(leftovers) - 1, 2)]
    blocks = list(chosen)
    if len(leftovers) % 2:
        last = leftovers[-1]
        if pairs:
            pairs[-1] = pairs[-1] | {last}
        else:
            xs = X.as_set()
            target = max(
                (i for i, G in enumerate(chosen) if G & xs),
                default=len(chosen) - 1,
            )
            blocks[target] = blocks[target] | {last}
    return BlockFamily(F.horizon, tuple(blocks + pairs), covering=F.covering)


# -- the S_+^φ pipeline --------------------------------------------------------


def x0_threshold(phi: Sequence[int], a: int) -> int:
    return 3 * phi[a + 4] + 6


def select_X0(X: WSet, phi: Sequence[int]) -> WSet:
    """Greedy subset of ``X`` whose consecutive gaps each hold more than
    ``3·φ(a + 4) + 6`` points of ``X`` (``a`` the left end of the gap)."""
    els = X.elements
    if not els:
        raise DensityInsufficient("X is empty on the window", 0)
    idx = 0
    chosen = [els[0]]
    while True:
        a = els[idx]
        if a + 4 >= len(phi):
            break
        nxt = idx + x0_threshold(phi, a) + 1
        if nxt >= len(els):
            break
        idx = nxt
        chosen.append(els[idx])
    if len(chosen) < 2:
        raise DensityInsufficient(
            "X is too sparse on the window to complete gap 0 of the thinned set", 0
        )
    return WSet(X.horizon, tuple(chosen))


@dataclass(frozen=True)
class ProofStep:
    gap_start: int
    gap_end: int
    first_index: int
    run_length: int
    verified: bool


@dataclass(frozen=True)
class PipelineTrace:
    X0: WSet
    X1: WSet
    f: dict[int, frozenset[int]]
    Y1: WSet
    Y: WSet
    matches: tuple[int, ...]
    steps: tuple[ProofStep, ...] = field(default_factory=tuple)

    def to_json(self) -> dict[str, Any]:
        return {
            "X0": self.X0.to_json(),
            "X1": self.X1.to_json(),
            "f": {str(p): sorted(v) for p, v in sorted(self.f.items())},
            "Y1": self.Y1.to_json(),
            "Y": self.Y.to_json(),
            "matches": list(self.matches),
            "steps": [
                {
                    "gap_start": s.gap_start,
                    "gap_end": s.gap_end,
                    "first_index": s.first_index,
                    "run_length": s.run_length,
                    "verified": s.verified,
                }
                for s in self.steps
            ],
        }


def _y0_gaps(Y0: WSet, horizon: int) -> list[tuple[int, int]]:
    ys = Y0.elements
    return [(p, q) for p, q in zip(ys, ys[1:]) if q <= horizon]


def pipeline_targets(
    X: WSet, phi: Sequence[int], Y0: WSet
) -> tuple[WSet, WSet, dict[int, frozenset[int]]]:
    """``X_0``, the ``Y_0``-gap starts ``X_1`` holding two ``X_0`` points, and the
    target ``f(p) = X ∩ [p, q)`` that a guessing oracle has to hit."""
    check_phi(phi, strict=False)
    X0 = select_X0(X, phi)
    X1 = []
    f: dict[int, frozenset[int]] = {}
    for p, q in _y0_gaps(Y0, X.horizon):
        if X0.count_in(p, q) >= 2:
            X1.append(p)
            f[p] = frozenset(x for x in X.elements[_lo(X, p) : _lo(X, q)])
    return X0, WSet(X.horizon, tuple(X1)), f


def _lo(X: WSet, v: int) -> int:
    return bisect_left(X.elements, v)


def s_plus_phi_pipeline(
    X: WSet, phi: Sequence[int], Y0: WSet, g: Mapping[int, Iterable[int]]
) -> PipelineTrace:
    """Build ``Y`` from the oracles ``Y0`` and ``g``.

    ``Y_1`` collects ``g(p) ∩ [p, q)`` over the gaps ``[p, q)`` of ``Y0`` and
    ``Y`` keeps every third point of ``Y_1``.  At every gap start ``p ∈ X_1``
    where ``g(p)`` equals the target, the trace records the first ``Y`` index
    inside the gap and checks that the promised run of rich gaps starts there.
    """
    X0, X1, f = pipeline_targets(X, phi, Y0)
    y1: set[int] = set()
    for p, q in _y0_gaps(Y0, X.horizon):
        y1.update(v for v in g.get(p, ()) if p <= v < q)
    Y1 = WSet(X.horizon, tuple(sorted(y1)))
    Y = WSet(X.horizon, Y1.elements[::3])
    matches = tuple(p for p in X1.elements if frozenset(g.get(p, ())) == f[p])
    steps = []
    gaps = dict(_y0_gaps(Y0, X.horizon))
    for p in matches:
        q = gaps[p]
        i = _lo(Y, p)
        if i >= len(Y) or Y.elements[i] >= q or i >= len(phi):
            steps.append(ProofStep(p, q, i, 0, False))
            continue
        run = phi[i]
        ys = Y.elements
        ok = i <= p and i + run < len(ys) and ys[i + run] <= q
        ok = ok and all(X.count_in(ys[j], ys[j + 1]) >= 2 for j in range(i, i + run))
        steps.append(ProofStep(p, q, i, run, ok))
    return PipelineTrace(X0, X1, f, Y1, Y, matches, tuple(steps))
