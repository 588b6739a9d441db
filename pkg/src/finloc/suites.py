"""Property suites behind ``finloc suite``.

A suite is a list of properties.  Random properties run in batches; batch
``b`` of property ``p`` in suite ``s`` draws from a generator seeded with
``(seed, s, p, b)``, so results do not depend on how batches are scheduled.
Exhaustive properties enumerate their whole domain in one go.  Each property
reports the number of cases, the number of failures and the first failing
case (lowest batch, then lowest case) with its full instance embedded.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Iterator

import numpy as np

from . import constructions as cons
from . import largeness as lg
from . import relations as rel
from . import randomname as rn
from .creatures import (
    ConditionFragment,
    PairCondition,
    build_S_H,
    compose_orders,
    contribution,
    creatures_equal,
    fragment_leq,
    glue_S,
    join,
    pair_leq,
    refines,
    shrink_contract,
    shrink_creature,
    sigma_member,
    sigma_star_member,
    upper_half,
    verify_derivation,
    weight,
)
from .creatures.creature import KSPLIT, Creature, validate_creature
from .creatures.derivation import shift_parts
from .creatures.norms import random_table_norm
from .errors import FinlocError, InvalidInstance, SlalomOverflow
from .finsets import BlockFamily, WSet, intervals_of, mu
from .generate import (
    gen_blockfamily,
    gen_creature,
    gen_fragment,
    gen_heavy_creature,
    gen_instance,
    gen_pair_condition,
    gen_wset,
    random_B,
    random_refinement,
)
from .localizers import KTree, ktree_localizes, ktree_to_slalom_cover, slalom_localizes

SUITES = ("relations", "largeness", "constructions", "creatures", "measure", "invariants")

Counterexample = dict[str, Any]


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    window: int = 120
    cases: int = 200
    batch_size: int = 50
    k_max: int = 4
    l_max: int = 4
    m_max: int = 2
    rel_size: int = 3
    tail_m_max: int = 16
    tail_R_max: int = 40
    mc_depth: int = 5
    mc_trials: int = 100_000
    shrink_cases: int = 20
    shrink_weights: tuple[int, ...] = (15, 16, 17)
    upper_half_cases: int = 500
    poset_cases: int = 500
    depth_cap: int = 3
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "shrink_weights", tuple(self.shrink_weights))
        positive = ("window", "cases", "batch_size", "k_max", "l_max", "m_max", "rel_size", "mc_depth",
                    "mc_trials", "shrink_cases", "upper_half_cases", "poset_cases", "depth_cap", "workers")
        for name in positive:
            if getattr(self, name) < 1:
                raise InvalidInstance(f"config field {name} must be positive, got {getattr(self, name)}")
        if self.seed < 0:
            raise InvalidInstance("seed must be a natural number")
        if self.l_max < 2:
            raise InvalidInstance("l_max must be at least 2")
        if not self.shrink_weights or min(self.shrink_weights) < 15:
            raise InvalidInstance("shrink weights must be nonempty and at least 15")
        if self.tail_m_max < 0 or self.tail_R_max < self.tail_m_max:
            raise InvalidInstance("need 0 <= tail_m_max <= tail_R_max")
        if not 1 <= self.mc_depth <= rn.MAX_DEPTH:
            raise InvalidInstance(f"mc_depth must be in [1, {rn.MAX_DEPTH}]")

    def to_json(self) -> dict[str, Any]:
        out = asdict(self)
        out["shrink_weights"] = list(self.shrink_weights)
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise InvalidInstance(f"unknown config fields: {sorted(extra)}")
        return cls(**data)


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    name: str
    cases: int
    failures: int
    counterexample: Counterexample | None = None
    detail: dict[str, Any] = field(default_factory=dict)
    seconds: float | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def to_json(self, timings: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "suite": self.suite,
            "property": self.name,
            "pass": self.passed,
            "cases": self.cases,
            "failures": self.failures,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.detail:
            out["detail"] = self.detail
        if timings and self.seconds is not None:
            out["seconds"] = round(self.seconds, 4)
        return out


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    results: tuple[PropertyResult, ...]
    seconds: float | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def summary(self, timings: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "summary": True,
            "suite": self.suite,
            "properties": len(self.results),
            "passed": sum(r.passed for r in self.results),
            "failed": sum(not r.passed for r in self.results),
            "all_pass": self.passed,
        }
        if timings and self.seconds is not None:
            out["seconds"] = round(self.seconds, 4)
        return out

    def lines(self, timings: bool = False) -> list[dict[str, Any]]:
        return [r.to_json(timings) for r in self.results] + [self.summary(timings)]


# -- property registry ----------------------------------------------------------------

CaseFn = Callable[[np.random.Generator, ExperimentConfig], "Counterexample | None"]
ExhaustiveFn = Callable[[ExperimentConfig], "tuple[int, int, Counterexample | None, dict[str, Any]]"]


@dataclass(frozen=True)
class Property:
    name: str
    case: CaseFn | None = None
    exhaustive: ExhaustiveFn | None = None
    count: Callable[[ExperimentConfig], int] = lambda cfg: cfg.cases


REGISTRY: dict[str, list[Property]] = {s: [] for s in SUITES}


def _random(suite: str, name: str, count: Callable[[ExperimentConfig], int] | None = None):
    def deco(fn: CaseFn) -> CaseFn:
        REGISTRY[suite].append(Property(name, case=fn, count=count or (lambda cfg: cfg.cases)))
        return fn

    return deco


def _exhaustive(suite: str, name: str):
    def deco(fn: ExhaustiveFn) -> ExhaustiveFn:
        REGISTRY[suite].append(Property(name, exhaustive=fn))
        return fn

    return deco


# -- relations --------------------------------------------------------------------------


def _xy(rng: np.random.Generator, cfg: ExperimentConfig) -> tuple[WSet, WSet]:
    window = int(rng.integers(10, min(cfg.window, 200) + 1))
    X = gen_wset(rng, window, density=float(rng.uniform(0.3, 0.95)))
    Y = gen_wset(rng, window, density=float(rng.uniform(0.05, 0.4)))
    return X, Y


def _all_relations(a: int, b: int) -> Iterator[rel.FiniteRelationInstance]:
    for bits in range(1 << (a * b)):
        table = tuple(tuple(bool(bits >> (i * b + j) & 1) for j in range(b)) for i in range(a))
        yield rel.FiniteRelationInstance(tuple(range(a)), tuple(range(b)), table)


@_exhaustive("relations", "duality_identities")
def _duality(cfg: ExperimentConfig) -> tuple[int, int, Counterexample | None, dict[str, Any]]:
    total = fails = 0
    first = None
    for a in range(1, cfg.rel_size + 1):
        for b in range(1, cfg.rel_size + 1):
            for inst in _all_relations(a, b):
                if not inst.satisfies_dom_rng():
                    continue
                total += 1
                v = rel.duality_values(inst)
                if v["d"] != v["b_dual"] or v["b"] != v["d_dual"]:
                    fails += 1
                    first = first or {"instance": inst.to_json(), "values": v}
    return total, fails, first, {}


@_random("relations", "forall_exists_same_witnesses")
def _forall_exists(rng, cfg):
    X, _ = _xy(rng, cfg)
    F = gen_blockfamily(rng, X.horizon, covering=bool(rng.random() < 0.5), min_size=1)
    k = int(rng.integers(0, 3))
    a, b = rel.eval_R_forall_k(X, F, k), rel.eval_R_exists_k(X, F, k)
    counts = [len(blk & X.as_set()) for blk in F.blocks]
    brute = tuple(n for n, c in enumerate(counts) if c <= k)
    if a.witnesses != b.witnesses or a.witnesses != brute:
        return {"X": X.to_json(), "F": F.to_json(), "k": k}
    return None


@_random("relations", "chain_monotonicity")
def _chain(rng, cfg):
    X, Y = _xy(rng, cfg)
    for k in range(1, cfg.k_max + 1):
        if len(Y) < k + 2:
            break
        big = set(rel.eval_S_k(X, Y, k + 1).witnesses)
        small = set(rel.eval_S_k(X, Y, k).witnesses)
        if not big <= small:
            return {"X": X.to_json(), "Y": Y.to_json(), "k": k, "extra": sorted(big - small)}
    for m in range(2, min(cfg.k_max + 2, len(Y))):
        longer = rel.eval_S_plus(X, Y, m)
        shorter = rel.eval_S_plus(X, Y, m - 1)
        if longer.holds and (not shorter.holds or shorter.start > longer.start):  # type: ignore[operator]
            return {"X": X.to_json(), "Y": Y.to_json(), "m": m}
    return None


@_random("relations", "threshold_monotonicity")
def _threshold(rng, cfg):
    X, Y = _xy(rng, cfg)
    k = int(rng.integers(1, cfg.k_max + 1))
    if len(Y) < k + 1:
        return None
    prev = None
    for c in range(2, 6):
        w = set(rel.eval_S_k(X, Y, k, threshold=c).witnesses)
        if prev is not None and not w <= prev:
            return {"X": X.to_json(), "Y": Y.to_json(), "k": k, "threshold": c}
        prev = w
    return None


@_random("relations", "splus_phi_and_eps_runs")
def _phi_runs(rng, cfg):
    X, Y = _xy(rng, cfg)
    rich = rel.rich_gaps(X, Y)
    steps = rng.integers(1, 3, size=len(rich) + 1)
    phi = [int(v) for v in np.cumsum(steps)]
    for n in rel.eval_S_plus_phi(X, Y, phi).witnesses:
        if not all(rich[n : n + phi[n]]) or n + phi[n] > len(rich):
            return {"X": X.to_json(), "Y": Y.to_json(), "phi": phi, "n": n}
        run = rel.eval_S_plus(X, Y, phi[n])
        if not run.holds or run.start > n:  # type: ignore[operator]
            return {"X": X.to_json(), "Y": Y.to_json(), "phi": phi, "n": n, "run": run.start}
    for n in rel.eval_S_plus_eps(X, Y).witnesses:
        run = rel.eval_S_plus(X, Y, 2**n)
        if not run.holds or run.start > 2**n:  # type: ignore[operator]
            return {"X": X.to_json(), "Y": Y.to_json(), "eps_n": n}
    return None


# -- largeness --------------------------------------------------------------------------


@_exhaustive("largeness", "transfer_oracle")
def _transfer(cfg: ExperimentConfig):
    total = fails = 0
    first = None
    sizes = []
    for l in range(2, cfg.l_max + 1):
        for k in range(0, l - 1):
            for m in range(1, cfg.m_max + 1):
                n = l * m
                if n > cfg.window:
                    continue
                sizes.append([l, k, m])
                K = range(n)
                for bits in range(1 << n):
                    X = [x for x in K if bits >> x & 1]
                    total += 1
                    if not lg.transfer_counting_check(K, X, l, k).holds:
                        fails += 1
                        first = first or {"K": list(K), "X": X, "l": l, "k": k}
    return total, fails, first, {"parameters": sizes}


def _m_blocks(rng: np.random.Generator, count: int, m: int) -> BlockFamily:
    perm = rng.permutation(count * m + int(rng.integers(0, 5)))
    blocks = tuple(frozenset(int(x) for x in perm[i * m : (i + 1) * m]) for i in range(count))
    return BlockFamily(len(perm), blocks)


@_random("largeness", "concat_transfer")
def _concat(rng, cfg):
    m = int(rng.integers(1, 4))
    l = int(rng.integers(2, cfg.l_max + 1))
    k = int(rng.integers(0, l - 1))
    F = _m_blocks(rng, l * int(rng.integers(1, 4)) + int(rng.integers(0, l)), m)
    X = gen_wset(rng, F.horizon)
    star = lg.concat_family(F, l)
    xs = X.as_set()
    for n, K in enumerate(star.blocks):
        if len(K) != l * m:
            return {"F": F.to_json(), "l": l, "n": n, "why": "size"}
        if len(K - xs) < l - k:
            for j in range(l * n, l * n + l):
                if not len(F.blocks[j] - xs) < l - k:
                    return {"F": F.to_json(), "X": X.to_json(), "l": l, "k": k, "j": j}
    return None


@_random("largeness", "derived_Y_meets")
def _derived(rng, cfg):
    m = int(rng.integers(1, 4))
    F = _m_blocks(rng, 2 * int(rng.integers(1, 6)), m)
    X = gen_wset(rng, F.horizon, density=float(rng.uniform(0.0, 0.5)))
    Y = lg.derived_Y(F, X).as_set()
    xs = X.as_set()
    for n in range(len(F) // 2):
        star = F.blocks[2 * n] | F.blocks[2 * n + 1]
        if len(star & xs) > m - 1 and not {2 * n, 2 * n + 1} & Y:
            return {"F": F.to_json(), "X": X.to_json(), "n": n}
    return None


@_random("largeness", "split_2_3")
def _split(rng, cfg):
    size = int(rng.integers(2, 30))
    K = sorted(int(x) for x in rng.choice(100, size=size, replace=False))
    want = int(rng.integers(1, size // 2 + 1))
    pieces = lg.split_into_2_3(K, want)
    union = frozenset().union(*pieces)
    ok = (
        all(len(p) in (2, 3) for p in pieces)
        and sum(len(p) for p in pieces) == len(K)
        and union == frozenset(K)
        and len(pieces) >= want
    )
    return None if ok else {"K": K, "min_pieces": want}


@_random("largeness", "lk_large_oracle")
def _lk(rng, cfg):
    l = int(rng.integers(2, cfg.l_max + 1))
    k = int(rng.integers(0, l))
    fams = tuple(_m_blocks(rng, int(rng.integers(1, 5)), l) for _ in range(int(rng.integers(1, 4))))
    horizon = max(f.horizon for f in fams)
    fams = tuple(BlockFamily(horizon, f.blocks) for f in fams)
    X = gen_wset(rng, horizon)
    tail = int(rng.integers(0, 3))
    v = lg.is_lk_large(X, lg.FamilyUniverse(fams), l, k, tail)
    xs = X.as_set()
    bad = [(i, n) for i, f in enumerate(fams) for n, b in enumerate(f.blocks) if n >= tail and len(b & xs) <= k]
    if v.large != (not bad) or (bad and (v.family, v.block) != bad[0]):
        return {"X": X.to_json(), "families": [f.to_json() for f in fams], "l": l, "k": k, "tail": tail}
    return None


# -- constructions ---------------------------------------------------------------------


@_random("constructions", "escaping_g_sound")
def _escape(rng, cfg):
    H = int(rng.integers(10, max(11, cfg.window) + 1))
    f = [int(v) for v in np.cumsum(rng.integers(1, 4, size=H + 1))]
    seq = [0]
    while seq[-1] < H:
        seq = cons.spread_sequence(f, len(seq) + 1)
    rng_f = {v for v in seq if v < H}
    F = gen_blockfamily(rng, H, covering=True, min_size=2, max_size=12)
    g = cons.partition_to_escaping_g(F)
    k = int(rng.integers(1, 3))
    for K in F.blocks:
        if len(K & rng_f) > k and not f[min(K)] < g[min(K)]:
            return {"f": f, "F": F.to_json(), "k": k, "block": sorted(K)}
    return None


def _maximal_partition(g: list[int], k: int) -> list[int]:
    cuts = [0]
    while cuts[-1] < len(g):
        cuts.append(k + 1 + cuts[-1] + g[cuts[-1]])
    return cuts


@_random("constructions", "intervals_sound")
def _intervals(rng, cfg):
    H = int(rng.integers(30, max(31, cfg.window) + 1))
    X = gen_wset(rng, H, density=float(rng.uniform(0.2, 0.9)))
    k = int(rng.integers(1, 3))
    g = [int(v) for v in np.maximum.accumulate(np.arange(H) + rng.integers(0, 6, size=H))]
    cuts = _maximal_partition(g, k)
    P = cons.g_to_interval_partition(g, k, len(cuts) - 1)
    if list(P.cutpoints) != cuts:
        return {"g": g, "k": k, "why": "cutpoints"}
    els = X.elements
    domain = els[len(els) - 2 * k - 1] + 1 if len(els) > 2 * k else 0
    crowd = cons.crowding_function(X, k, domain)
    for n in range(len(cuts) - 2):
        lo, mid, hi = cuts[n], cuts[n + 1], cuts[n + 2]
        if hi > H:
            break
        for m in range(lo, min(mid, domain)):
            if crowd[m] < g[m] and not (X.count_in(lo, mid) > k or X.count_in(mid, hi) > k):
                return {"X": X.to_json(), "g": g, "k": k, "m": m, "n": n}
    return None


@_random("constructions", "meabou_disjoint_blocks")
def _meabou(rng, cfg):
    H = int(rng.integers(6, max(7, cfg.window // 2) + 1))
    F = gen_blockfamily(rng, H, covering=True, min_size=2, max_size=6)
    X = gen_wset(rng, H, density=float(rng.uniform(0.1, 0.7)))
    g = []
    for K in F.blocks:
        pts = sorted(K)
        size = int(rng.integers(2, len(pts) + 1))
        g.append(frozenset(int(x) for x in rng.choice(pts, size=size, replace=False)))
    out = cons.meabou_partition(X, F, g)
    xs = X.as_set()
    case = {"X": X.to_json(), "F": F.to_json(), "g": [sorted(G) for G in g]}
    blocks = list(out.blocks)
    if any(len(b) < 2 for b in blocks):
        return {**case, "why": "small block"}
    if sum(len(b) for b in blocks) != len(frozenset().union(*blocks)) or frozenset().union(*blocks) != frozenset().union(*F.blocks):
        return {**case, "why": "not a partition"}
    # a lone leftover with no pair to join has to be absorbed by some g-block
    lone = len(frozenset().union(*F.blocks)) - sum(len(G) for G in g) == 1
    changed = [G for G in g if not G & xs and G not in blocks]
    if len(changed) > (1 if lone else 0):
        return {**case, "why": "empty g-block changed", "g_block": sorted(changed[0])}
    return None


@_random("constructions", "splusphi_perfect_oracle")
def _pipeline(rng, cfg):
    H = int(rng.integers(200, max(201, 3 * cfg.window) + 1))
    X = gen_wset(rng, H, density=float(rng.uniform(0.8, 1.0)))
    slope = int(rng.integers(20, 60))
    phi = [1 + n // slope for n in range(H + 5)]
    Y0 = gen_wset(rng, H, density=float(rng.uniform(0.02, 0.06)))
    try:
        _, _, f = cons.pipeline_targets(X, phi, Y0)
    except FinlocError:
        return None
    tr = cons.s_plus_phi_pipeline(X, phi, Y0, f)
    wits = set(rel.eval_S_plus_phi(X, tr.Y, phi, strict=False).witnesses)
    case = {"X": X.to_json(), "phi_slope": slope, "Y0": Y0.to_json()}
    if set(tr.matches) != set(f):
        return {**case, "why": "perfect oracle missed a target"}
    for s in tr.steps:
        if not s.verified or s.first_index not in wits:
            return {**case, "why": "step failed", "gap": [s.gap_start, s.gap_end]}
    if tr.matches and not wits:
        return {**case, "why": "no witness"}
    return None


@_random("constructions", "lemat_witness")
def _lemat(rng, cfg):
    k = int(rng.integers(0, 3))
    depth = 9
    bits = tuple(int(b) for b in rng.integers(0, 2, size=depth))
    x = cons.BranchPrefix(bits)
    chain = [cons.encode(bits[:i]) for i in range(depth)]
    off = [c for c in range(cons.encode((1,) * (depth - 1)) + 1) if c not in set(chain)]
    off = [int(v) for v in rng.permutation(off)]
    honest = rng.random() < 0.5
    blocks = []
    used: set[int] = set()
    for n in range(int(rng.integers(1, 5))):
        on = [chain[n + 1]] if n + 1 < depth else []
        take = k if not honest or rng.random() < 0.5 else k + 1
        pts = on + [off.pop() for _ in range(take)]
        blocks.append(frozenset(pts))
        used |= set(pts)
    F = BlockFamily(max(used) + 1, tuple(blocks))
    res = cons.lemat_witness(x, F, k)
    brute = next((n for n, b in enumerate(F.blocks) if len(b - set(chain)) >= k + 1), None)
    case = {"bits": list(bits), "F": F.to_json(), "k": k}
    if res.index != brute:
        return {**case, "got": res.index, "expected": brute}
    if res.index is None:
        tr = res.trace
        if tr is None or any(len(s) > k + 1 for s in tr.F_sets):
            return {**case, "why": "trace"}
        sel = tr.selected_indices
        if any(tr.u[a] >= tr.d[b] for a, b in zip(sel, sel[1:])):
            return {**case, "why": "trace not separated"}
    return None


# -- creatures --------------------------------------------------------------------------


def _small_creature(rng: np.random.Generator, start: int = 0) -> Creature:
    k = int(rng.integers(2, 4))
    if rng.random() < 0.2:
        return gen_creature(rng, k, depth=1, start=start, log_width=1024, max_width=8)
    return gen_creature(rng, k, depth=int(rng.integers(1, 4)), start=start, log_width=1024 if rng.random() < 0.3 else 0)


@_random("creatures", "upper_half_identity", count=lambda cfg: cfg.upper_half_cases)
def _uh(rng, cfg):
    t = _small_creature(rng)
    u = upper_half(t)
    w = weight(t)
    if weight(u) != w - w // 2 or contribution(u) != contribution(t):
        return {"creature": t.to_json(), "weight": w, "weight_uh": weight(u)}
    validate_creature(u, check_norms=False)
    return None


@_random("creatures", "refines_partial_order")
def _refines(rng, cfg):
    t = _small_creature(rng)
    t1 = random_refinement(rng, t)
    t2 = random_refinement(rng, t1)
    for c in (t1, t2):
        validate_creature(c)
    ok = refines(t, t) and refines(t, t1) and refines(t1, t2) and refines(t, t2)
    if refines(t1, t) and not creatures_equal(t, t1):
        ok = False
    return None if ok else {"creature": t.to_json(), "t1": t1.to_json(), "t2": t2.to_json()}


def _parts(rng: np.random.Generator, k: int, count: int, start: int = 0, no_ksplit_root: bool = False) -> list[Creature]:
    parts = []
    pos = start
    while len(parts) < count:
        t = gen_creature(rng, k, depth=int(rng.integers(1, 3)), start=pos, max_width=5)
        if no_ksplit_root and t.kind(()) == KSPLIT:
            continue
        parts.append(t)
        pos = t.R[()] + 1 + int(rng.integers(0, 3))
    return parts


@_random("creatures", "build_and_glue_in_sigma")
def _sigma(rng, cfg):
    k = int(rng.integers(2, 4))
    parts = _parts(rng, k, k + 1 + int(rng.integers(0, 3)))
    H = random_table_norm(range(len(parts)), rng)
    built = build_S_H(parts, H)
    validate_creature(built)
    glued_parts = _parts(rng, k, k, no_ksplit_root=True)
    glued = glue_S(glued_parts)
    validate_creature(glued)
    if not sigma_member(built, parts) or not sigma_member(glued, glued_parts):
        return {"parts": [p.to_json() for p in parts], "glued_parts": [p.to_json() for p in glued_parts]}
    return None


@_random("creatures", "sigma_star_certificates")
def _star(rng, cfg):
    k = int(rng.integers(2, 4))
    parts = _parts(rng, k, k + 1)
    i = int(rng.integers(0, len(parts)))
    choice = int(rng.integers(0, 3))
    if choice == 0:
        target = upper_half(parts[i])
    elif choice == 1:
        target = random_refinement(rng, parts[i])
    else:
        target = build_S_H(parts, random_table_norm(range(len(parts)), rng))
    v = sigma_star_member(target, parts, cfg.depth_cap)
    if not v.derivable or not verify_derivation(v.certificate, parts):  # type: ignore[arg-type]
        return {"parts": [p.to_json() for p in parts], "target": target.to_json(), "op": choice}
    return None


@_random("creatures", "shrink_contract", count=lambda cfg: cfg.shrink_cases)
def _shrink(rng, cfg):
    w = int(rng.choice(cfg.shrink_weights, p=_weight_mix(cfg.shrink_weights)))
    k = int(rng.integers(2, 4))
    shape = "k-root" if w == min(cfg.shrink_weights) and rng.random() < 0.3 else "wide-root"
    t = gen_heavy_creature(rng, k, w, shape)
    B = random_B(rng, 0, t.R[()] + 1)
    t2 = shrink_creature(t, B)
    c = shrink_contract(t, t2, B)
    if not c:
        return {"k": k, "weight": w, "shape": shape, "B": B.to_json(), "contract": c.to_json(), "creature": t.to_json()}
    return None


def _weight_mix(weights: tuple[int, ...]) -> list[float]:
    # heavier creatures are slower, so they are drawn less often
    raw = [2.0 ** -(w - min(weights)) for w in weights]
    return [r / sum(raw) for r in raw]


@_exhaustive("creatures", "quartering_loss")
def _quarter(cfg: ExperimentConfig):
    rng = np.random.default_rng([cfg.seed, 99])
    total = fails = 0
    first = None
    for size in range(2, 9):
        n = random_table_norm(range(size), rng)
        vals = n.effective_values()
        full = (1 << size) - 1
        colors = np.array(list(product(range(4), repeat=size)), dtype=np.int64)
        weights = 1 << np.arange(size, dtype=np.int64)
        best = np.max(np.stack([vals[((colors == c) * weights).sum(axis=1)] for c in range(4)]), axis=0)
        total += len(colors)
        bad = np.flatnonzero(best < vals[full] - 2)
        if len(bad):
            fails += len(bad)
            first = first or {"norm": n.to_json(), "coloring": colors[bad[0]].tolist()}
    return total, fails, first, {}


@_random("creatures", "fragment_order", count=lambda cfg: cfg.poset_cases)
def _fragment(rng, cfg):
    k = 2
    p = gen_fragment(rng, k, count=int(rng.integers(3, 5)), depth=int(rng.integers(1, 3)), max_width=4)
    q = extend_fragment(rng, p)
    r = extend_fragment(rng, q)
    case = {"p": p.to_json(), "q": q.to_json(), "r": r.to_json()}
    refl = fragment_leq(p, p, depth_cap=cfg.depth_cap)
    pq = fragment_leq(p, q, depth_cap=cfg.depth_cap)
    qr = fragment_leq(q, r, depth_cap=cfg.depth_cap)
    if not (refl and pq and qr):
        return {**case, "why": "direct order", "refl": refl.holds, "pq": pq.holds, "qr": qr.holds}
    pr = compose_orders(pq, qr)
    hints = {i: shift_parts(d, pr.n[i]) for i, d in enumerate(pr.derivations)}
    got = fragment_leq(p, r, hints=hints, depth_cap=cfg.depth_cap)
    if not got:
        return {**case, "why": "composed certificate rejected"}
    return None


def extend_fragment(rng: np.random.Generator, p: ConditionFragment) -> ConditionFragment:
    """A random pure extension: possibly move the first creature's points into
    ``w``, then take upper halves, refinements or builds of the rest."""
    creatures = list(p.creatures)
    w = set(p.w)
    if len(creatures) > 1 and rng.random() < 0.3:
        first = creatures.pop(0)
        cont = sorted(contribution(first))
        w |= {x for x in cont if rng.random() < 0.5}
    out: list[Creature] = []
    i = 0
    while i < len(creatures):
        t = creatures[i]
        k = t.k
        r = rng.random()
        if r < 0.2 and i + k + 1 <= len(creatures):
            group = creatures[i : i + k + 1]
            out.append(build_S_H(group, random_table_norm(range(len(group)), rng)))
            i += k + 1
            continue
        if r < 0.45:
            out.append(upper_half(t))
        elif r < 0.7:
            out.append(random_refinement(rng, t))
        else:
            out.append(t)
        i += 1
    return ConditionFragment(frozenset(w), tuple(out))


@_random("creatures", "pair_order", count=lambda cfg: cfg.poset_cases)
def _pairs(rng, cfg):
    p0 = gen_pair_condition(rng)
    p1 = _extend_pair(rng, p0)
    p2 = _extend_pair(rng, p1)
    q = PairCondition(p0.u, gen_pair_condition(rng).KK)
    case = {"p0": p0.to_json(), "p1": p1.to_json(), "p2": p2.to_json(), "q": q.to_json()}
    if not (pair_leq(p0, p0) and pair_leq(p0, p1) and pair_leq(p1, p2) and pair_leq(p0, p2)):
        return {**case, "why": "order"}
    j = join(p0, q)
    if not (pair_leq(p0, j) and pair_leq(q, j)):
        return {**case, "why": "join"}
    return None


def _extend_pair(rng: np.random.Generator, p: PairCondition) -> PairCondition:
    top = max(p.u, default=-1)
    # new points of u go above max u and never complete an old pair
    cand = [x for x in range(top + 1, top + 12) if rng.random() < 0.3]
    new_u = set(p.u)
    for x in cand:
        trial = new_u | {x}
        if any(K <= trial and not K <= p.u for F in p.KK for K in F):
            continue
        new_u = trial
    extra = gen_pair_condition(rng, universe=16, families=1).KK if rng.random() < 0.5 else frozenset()
    return PairCondition(frozenset(new_u), p.KK | extra)


# -- measure ----------------------------------------------------------------------------


@_exhaustive("measure", "tail_bound_closed_form")
def _tail(cfg: ExperimentConfig):
    total = 0
    for m in range(cfg.tail_m_max + 1):
        total += 1
        if rn.tail_bound(m) != Fraction(2, 2 ** (2 * m)) / 3:
            return total, 1, {"m": m, "tail_bound": rn.fraction_json(rn.tail_bound(m))}, {}
    return total, 0, None, {}


@_exhaustive("measure", "partial_sums_below_bound")
def _partial(cfg: ExperimentConfig):
    total = 0
    for m in range(cfg.tail_m_max + 1):
        bound = rn.tail_bound(m)
        s = Fraction(0)
        for R in range(m, cfg.tail_R_max + 1):
            s += Fraction(2 ** (R * R), 2 ** ((R + 1) ** 2))
            total += 1
            rest = Fraction(1, 2 ** (2 * R + 3)) * Fraction(4, 3)
            if not s < bound or bound - s != rest:
                return total, 1, {"m": m, "R": R, "sum": rn.fraction_json(s)}, {}
    return total, 0, None, {}


@_exhaustive("measure", "empty_meet_normalisation")
def _normalise(cfg: ExperimentConfig):
    model = rn.NameModel(min(cfg.mc_depth, 4))
    ls = model.ls.values
    total = 0
    for j in range(model.depth):
        total += 1
        s = sum((rn.empty_meet_probability([x], model) for x in range(ls[j], ls[j + 1])), Fraction(0))
        if s != 1:
            return total, 1, {"block": j, "sum": rn.fraction_json(s)}, {}
    for j in range(1, model.depth):
        total += 1
        if ls[j + 1] - ls[j] >= 2 and rn.empty_meet_probability([ls[j], ls[j] + 1], model) != 0:
            return total, 1, {"block": j, "why": "doubly hit block"}, {}
    return total, 0, None, {}


@_random("measure", "empty_meet_multiplicative")
def _mult(rng, cfg):
    model = rn.NameModel(min(cfg.mc_depth, 5))
    ls = model.ls.values
    blocks = sorted(int(b) for b in rng.choice(model.depth, size=int(rng.integers(1, model.depth + 1)), replace=False))
    K = [int(rng.integers(ls[b], ls[b + 1])) for b in blocks]
    want = Fraction(1)
    for b in blocks:
        want *= Fraction(1, 2 ** (b * b))
    got = rn.empty_meet_probability(K, model)
    parts = [rn.empty_meet_probability([x], model) for x in K]
    prod_parts = Fraction(1)
    for q in parts:
        prod_parts *= q
    return None if got == want == prod_parts else {"K": K, "depth": model.depth}


def pair_family(start: int, horizon: int) -> BlockFamily:
    blocks = tuple(frozenset((x, x + 1)) for x in range(start, horizon - 1, 2))
    return BlockFamily(horizon, blocks)


@_exhaustive("measure", "failure_bound_within_tail")
def _bound(cfg: ExperimentConfig):
    model = rn.NameModel(cfg.mc_depth)
    l1 = model.ls.values[1]
    detail = {}
    total = 0
    for name, start in (("pairs", l1), ("shifted_pairs", l1 + 1)):
        F = pair_family(start, model.horizon)
        fb = rn.localization_failure_bound(F, 1, model)
        total += 1
        detail[name] = {"value": rn.fraction_json(fb.value), "bound": rn.fraction_json(fb.bound)}
        if not fb.within or fb.bound != Fraction(1, 6):
            return total, 1, {"family": name, **detail[name]}, detail
    return total, 0, None, detail


@_exhaustive("measure", "monte_carlo_vs_exact")
def _mc(cfg: ExperimentConfig):
    model = rn.NameModel(cfg.mc_depth)
    l1 = model.ls.values[1]
    detail: dict[str, Any] = {}
    bad = None
    fails = 0
    for i, (name, start) in enumerate((("pairs", l1), ("shifted_pairs", l1 + 1))):
        F = pair_family(start, model.horizon)
        exact = rn.localization_failure_bound(F, 1, model).value
        est = rn.mc_localization_rate(F, 1, model, cfg.mc_trials, cfg.seed + i)
        p = float(exact)
        sigma = math.sqrt(p * (1 - p) / cfg.mc_trials)
        dev = abs(est.rate - p)
        ok = dev <= 3 * sigma
        detail[name] = {"exact": rn.fraction_json(exact), "rate": est.rate, "sigma": sigma, "deviation": dev, "pass": ok}
        if not ok:
            fails += 1
            bad = bad or {"family": name, **detail[name]}
    return 2, fails, bad, detail


@_random("measure", "sample_consistency")
def _sample(rng, cfg):
    model = rn.NameModel(min(cfg.mc_depth, 4))
    S = rn.sample_name(model, rng)
    F = gen_blockfamily(rng, model.horizon, covering=True, min_size=2, max_size=5)
    rep = rel.eval_R_exists_k(S, F, 0)
    xs = S.as_set()
    disjoint = tuple(n for n, b in enumerate(F.blocks) if not b & xs)
    return None if rep.witnesses == disjoint else {"sample": S.to_json(), "F": F.to_json()}


# -- invariants ------------------------------------------------------------------------


@_random("invariants", "generated_instances_valid")
def _generated(rng, cfg):
    for kind in ("wset", "blockfamily", "creature", "fragment", "relinstance"):
        data = gen_instance(kind, rng, window=min(cfg.window, 60))
        try:
            if kind == "wset":
                back = WSet.from_json(data).to_json()
            elif kind == "blockfamily":
                back = BlockFamily.from_json(data).to_json()
            elif kind == "creature":
                t = Creature.from_json(data)
                validate_creature(t)
                back = t.to_json()
            elif kind == "fragment":
                fr = ConditionFragment.from_json(data)
                for t in fr.creatures:
                    validate_creature(t)
                back = fr.to_json()
            else:
                back = rel.FiniteRelationInstance.from_json(data).to_json()
        except FinlocError as e:
            return {"kind": kind, "instance": data, "error": str(e)}
        if back != data:
            return {"kind": kind, "instance": data, "why": "JSON round trip"}
    return None


@_random("invariants", "mu_and_intervals")
def _mu(rng, cfg):
    X = gen_wset(rng, int(rng.integers(1, cfg.window + 1)))
    vals = [mu(X, n) for n in range(len(X))]
    if any(a >= b for a, b in zip(vals, vals[1:])):
        return {"X": X.to_json(), "why": "mu not increasing"}
    if len(X) >= 2:
        F = intervals_of(X)
        flat = sorted(x for b in F.blocks for x in b)
        if flat != list(range(flat[0], flat[0] + len(flat))) or len(flat) != len(set(flat)):
            return {"X": X.to_json(), "why": "intervals not contiguous"}
        for n, b in enumerate(F.blocks):
            if vals[n] not in b or (n + 1 < len(vals) and vals[n + 1] in b):
                return {"X": X.to_json(), "why": "interval membership", "n": n}
    return None


@_exhaustive("invariants", "coding_bijection")
def _coding(cfg: ExperimentConfig):
    total = 0
    for code in range(1 << 12):
        total += 1
        if cons.encode(cons.decode(code)) != code:
            return total, 1, {"code": code}, {}
    for length in range(9):
        for bits in product((0, 1), repeat=length):
            total += 1
            if cons.decode(cons.encode(bits)) != bits:
                return total, 1, {"bits": list(bits)}, {}
    return total, 0, None, {}


@_random("invariants", "ktree_to_slalom")
def _ktree(rng, cfg):
    k = int(rng.integers(2, 4))
    depth = int(rng.integers(1, 5))
    branches = [tuple(int(v) for v in rng.integers(0, 3, size=depth)) for _ in range(int(rng.integers(1, k + 1)))]
    try:
        T = KTree.of(k, branches)
    except InvalidInstance:
        return None
    try:
        S = ktree_to_slalom_cover(T, depth)
    except SlalomOverflow:
        return None
    for f in product(range(4), repeat=depth):
        if ktree_localizes(f, T) and not slalom_localizes(f, S):
            return {"tree": T.to_json(), "f": list(f)}
    return None


# -- running ------------------------------------------------------------------------------


def _batch_seed(cfg: ExperimentConfig, suite: str, prop: int, batch: int) -> list[int]:
    return [cfg.seed, SUITES.index(suite), prop, batch]


def _run_batch(args: tuple[str, int, int, int, ExperimentConfig]) -> tuple[int, int, int, Counterexample | None]:
    suite, pi, batch, n, cfg = args
    prop = REGISTRY[suite][pi]
    rng = np.random.default_rng(_batch_seed(cfg, suite, pi, batch))
    fails = 0
    first = None
    for _ in range(n):
        try:
            bad = prop.case(rng, cfg)  # type: ignore[misc]
        except FinlocError as e:
            bad = {"error": type(e).__name__, "message": str(e)}
        if bad is not None:
            fails += 1
            if first is None:
                first = bad
    return batch, n, fails, first


def run_property(suite: str, index: int, cfg: ExperimentConfig, pool: ProcessPoolExecutor | None = None) -> PropertyResult:
    prop = REGISTRY[suite][index]
    t0 = time.perf_counter()
    if prop.exhaustive is not None:
        count, fails, bad, detail = prop.exhaustive(cfg)
        return PropertyResult(suite, prop.name, count, fails, bad, detail, time.perf_counter() - t0)
    total = prop.count(cfg)
    jobs = []
    b = 0
    while b * cfg.batch_size < total:
        n = min(cfg.batch_size, total - b * cfg.batch_size)
        jobs.append((suite, index, b, n, cfg))
        b += 1
    outs = list(pool.map(_run_batch, jobs)) if pool is not None else [_run_batch(j) for j in jobs]
    outs.sort(key=lambda o: o[0])
    cases = sum(o[1] for o in outs)
    fails = sum(o[2] for o in outs)
    first = next((o[3] for o in outs if o[3] is not None), None)
    return PropertyResult(suite, prop.name, cases, fails, first, {}, time.perf_counter() - t0)


def property_names(suite: str) -> list[str]:
    if suite not in REGISTRY:
        raise InvalidInstance(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return [p.name for p in REGISTRY[suite]]


def run_suite(name: str, cfg: ExperimentConfig | None = None, only: list[str] | None = None) -> SuiteReport:
    cfg = cfg or ExperimentConfig()
    names = property_names(name)
    if only:
        missing = set(only) - set(names)
        if missing:
            raise InvalidInstance(f"suite {name} has no properties {sorted(missing)}")
    t0 = time.perf_counter()
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        results = tuple(
            run_property(name, i, cfg, pool) for i, p in enumerate(names) if not only or p in only
        )
    finally:
        if pool is not None:
            pool.shutdown()
    return SuiteReport(name, results, time.perf_counter() - t0)
