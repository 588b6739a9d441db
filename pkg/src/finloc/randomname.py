"""Exact and sampled measure arithmetic for a random set missing one point per block.

Blocks are ``[l_j, l_{j+1})`` with ``l_0 = 0`` and ``l_{j+1} = l_j + 2**(j*j)``.
Inside block ``j`` exactly one point is missing, uniformly and independently
of the other blocks, so a given point of block ``j`` is missing with
probability ``2**-(j*j)``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .errors import DepthExceeded, InvalidInstance
from .finsets import BlockFamily, WSet

MAX_DEPTH = 8


@dataclass(frozen=True)
class LSequence:
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        vals = self.values
        if not vals or vals[0] != 0:
            raise InvalidInstance("block boundaries start at 0")
        for j, (a, b) in enumerate(zip(vals, vals[1:])):
            if b - a != 2 ** (j * j):
                raise InvalidInstance(f"block {j} has length {b - a}, expected {2 ** (j * j)}")

    @property
    def depth(self) -> int:
        return len(self.values) - 1

    def block_of(self, x: int) -> int:
        """Index of the block containing ``x``."""
        if x < 0 or x >= self.values[-1]:
            raise DepthExceeded(f"{x} lies outside the modeled blocks [0, {self.values[-1]})")
        return bisect_right(self.values, x) - 1


def l_sequence(depth: int) -> LSequence:
    if not 0 <= depth <= MAX_DEPTH:
        raise DepthExceeded(f"depth must be in [0, {MAX_DEPTH}], got {depth}")
    vals = [0]
    for j in range(depth):
        vals.append(vals[-1] + 2 ** (j * j))
    return LSequence(tuple(vals))


@dataclass(frozen=True)
class NameModel:
    depth: int

    def __post_init__(self) -> None:
        if not 1 <= self.depth <= MAX_DEPTH:
            raise DepthExceeded(f"depth must be in [1, {MAX_DEPTH}], got {self.depth}")

    @property
    def ls(self) -> LSequence:
        return l_sequence(self.depth)

    @property
    def horizon(self) -> int:
        return self.ls.values[-1]

    def missing_probability(self, block: int) -> Fraction:
        return Fraction(1, 2 ** (block * block))


def fraction_json(q: Fraction) -> dict[str, int]:
    return {"num": q.numerator, "den": q.denominator}


def empty_meet_probability(K: Iterable[int], model: NameModel) -> Fraction:
    """Exact probability that every point of ``K`` is missing."""
    ls = model.ls
    blocks = [ls.block_of(x) for x in K]
    if len(set(blocks)) != len(blocks):
        return Fraction(0)
    out = Fraction(1)
    for b in blocks:
        out *= model.missing_probability(b)
    return out


def tail_bound(m: int) -> Fraction:
    """``Σ_{r≥m} 2**-(2r+1)`` summed in closed form: ``2**-(2m+1) / (1 - 1/4)``."""
    if m < 0:
        raise InvalidInstance("m must be a natural number")
    return Fraction(1, 2 ** (2 * m + 1)) / (1 - Fraction(1, 4))


def tail_partial_sum(m: int, R: int) -> Fraction:
    """``Σ_{r=m}^{R} 2**(r*r) * 2**-((r+1)**2)``, term by term."""
    return sum(
        (Fraction(2 ** (r * r), 2 ** ((r + 1) ** 2)) for r in range(m, R + 1)),
        Fraction(0),
    )


@dataclass(frozen=True)
class FailureBound:
    value: Fraction
    bound: Fraction
    terms: tuple[tuple[int, Fraction], ...]

    @property
    def within(self) -> bool:
        return self.value <= self.bound

    def to_json(self) -> dict[str, Any]:
        return {
            "value": fraction_json(self.value),
            "bound": fraction_json(self.bound),
            "within": self.within,
            "terms": [[n, fraction_json(q)] for n, q in self.terms],
        }


def localization_failure_bound(F: BlockFamily, m: int, model: NameModel) -> FailureBound:
    """Union bound on some block starting at or after ``l_m`` missing the set entirely."""
    ls = model.ls
    if m > model.depth:
        raise DepthExceeded(f"m={m} exceeds the model depth {model.depth}")
    lm = ls.values[m]
    terms = []
    for n, K in enumerate(F.blocks):
        if len(K) < 2:
            raise InvalidInstance(f"block {n} has fewer than 2 points")
        if max(K) >= model.horizon:
            raise DepthExceeded(f"block {n} reaches past the modeled blocks")
        if min(K) >= lm:
            terms.append((n, empty_meet_probability(K, model)))
    value = sum((q for _, q in terms), Fraction(0))
    return FailureBound(value, tail_bound(m), tuple(terms))


def sample_name(model: NameModel, seed: int | np.random.Generator) -> WSet:
    """All points below ``l_depth`` except one uniformly chosen per block."""
    if model.horizon > 10**7:
        raise DepthExceeded("sample is too large to materialise; use sample_missing instead")
    rng = np.random.default_rng(seed)
    ls = model.ls.values
    missing = {int(ls[j] + rng.integers(0, ls[j + 1] - ls[j])) for j in range(model.depth)}
    return WSet(model.horizon, tuple(x for x in range(model.horizon) if x not in missing))


def sample_missing(model: NameModel, rng: np.random.Generator, trials: int) -> np.ndarray:
    """``trials × depth`` array of missing points, one column per block."""
    ls = np.asarray(model.ls.values, dtype=np.int64)
    sizes = ls[1:] - ls[:-1]
    u = rng.integers(0, sizes, size=(trials, model.depth))
    return ls[:-1] + u


@dataclass(frozen=True)
class MCRate:
    trials: int
    failures: int
    radius: float

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    def to_json(self) -> dict[str, Any]:
        return {"trials": self.trials, "failures": self.failures, "rate": self.rate, "radius": self.radius}


def mc_localization_rate(F: BlockFamily, m: int, model: NameModel, trials: int, seed: int) -> MCRate:
    """Fraction of sampled sets for which some block starting at or after ``l_m``
    is missed entirely, with a 3σ radius from the empirical rate."""
    if trials <= 0:
        raise InvalidInstance("need at least one trial")
    ls = model.ls
    lm = ls.values[m] if m <= model.depth else math.inf
    rng = np.random.default_rng(seed)
    missing = sample_missing(model, rng, trials)
    failed = np.zeros(trials, dtype=bool)
    for K in F.blocks:
        if min(K) < lm:
            continue
        if max(K) >= model.horizon:
            raise DepthExceeded("block reaches past the modeled blocks")
        blocks = [ls.block_of(x) for x in K]
        if len(set(blocks)) != len(blocks):
            continue  # one block can only miss one point
        hit = np.ones(trials, dtype=bool)
        for x, b in zip(K, blocks):
            hit &= missing[:, b] == x
        failed |= hit
    f = int(failed.sum())
    p = f / trials
    return MCRate(trials, f, 3 * math.sqrt(p * (1 - p) / trials))
