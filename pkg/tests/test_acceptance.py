"""Exit criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line (shown in the terminal summary and
printed to stdout) before asserting, so a failing criterion still reports.
Run on its own with ``pytest -m acceptance -s`` or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction
from itertools import product

import pytest

from conftest import ACCEPTANCE_LINES
from finloc import randomname as rn
from finloc.suites import ExperimentConfig, run_suite

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def timed(suite: str, cfg: ExperimentConfig, only: list[str]):
    t0 = time.perf_counter()
    rep = run_suite(suite, cfg, only=only)
    return {r.name: r for r in rep.results}, time.perf_counter() - t0


def test_1_tail_bound_reproduction():
    t0 = time.perf_counter()
    res, _ = timed("measure", ExperimentConfig(tail_m_max=16, tail_R_max=40),
                   ["tail_bound_closed_form", "partial_sums_below_bound"])
    # direct restatement: bound = (1/3) 2^(1-2m), partial sums strictly below for every R <= 40
    direct = all(rn.tail_bound(m) == Fraction(1, 3) * Fraction(2) ** (1 - 2 * m) for m in range(17))
    below = all(rn.tail_partial_sum(m, R) < rn.tail_bound(m) for m in range(17) for R in range(m, 41))
    secs = time.perf_counter() - t0
    sums = res["partial_sums_below_bound"].cases
    ok = all(r.passed for r in res.values()) and direct and below and sums == sum(41 - m for m in range(17)) and secs < 1
    record(1, "tail bound", ok, f"m<=16 closed form exact, {sums} partial sums (R<=40) strictly below, {secs:.2f}s (<1s)")
    assert ok


def test_2_upper_half_identity():
    res, secs = timed("creatures", ExperimentConfig(upper_half_cases=500), ["upper_half_identity"])
    r = res["upper_half_identity"]
    ok = r.passed and r.cases >= 500 and secs < 10
    record(2, "upper half", ok, f"{r.cases} creatures, {r.failures} failures, {secs:.2f}s (<10s)")
    assert ok, r.counterexample


def test_3_shrink_contract():
    res, secs = timed("creatures", ExperimentConfig(shrink_cases=100, shrink_weights=(15, 16, 17)), ["shrink_contract"])
    r = res["shrink_contract"]
    ok = r.passed and r.cases >= 100 and secs < 120
    record(3, "shrink contract", ok, f"{r.cases} creatures of weight 15..17, {r.failures} failures, {secs:.1f}s (<120s)")
    assert ok, r.counterexample


def test_4_transfer_oracle():
    res, secs = timed("largeness", ExperimentConfig(window=8, l_max=4, m_max=2), ["transfer_oracle"])
    r = res["transfer_oracle"]
    want = sorted([l, k, m] for l in (2, 3, 4) for k in range(l - 1) for m in (1, 2) if l * m <= 8)
    covered = sorted(r.detail["parameters"]) == want
    ok = r.passed and covered and r.cases == sum(2 ** (l * m) for l, _, m in want) and secs < 30
    record(4, "transfer oracle", ok, f"{r.cases} subsets over {len(want)} (l,k,m) with lm<=8, {r.failures} failures, {secs:.2f}s (<30s)")
    assert ok, r.counterexample


def _dom_rng_count(a: int, b: int) -> int:
    # R and its complement both have full domain and range: no constant row or column
    def mixed(v) -> bool:
        return 0 < sum(v) < len(v)

    rows = [r for r in product((0, 1), repeat=b) if mixed(r)]
    return sum(1 for m in product(rows, repeat=a) if all(mixed(c) for c in zip(*m)))


def test_5_duality_identities():
    res, secs = timed("relations", ExperimentConfig(rel_size=3), ["duality_identities"])
    r = res["duality_identities"]
    n33 = _dom_rng_count(3, 3)
    expected = sum(_dom_rng_count(a, b) for a in (1, 2, 3) for b in (1, 2, 3))
    ok = r.passed and n33 > 0 and r.cases == expected and secs < 60
    record(5, "duality", ok, f"{r.cases} relations up to 3x3 ({n33} of size 3x3), {r.failures} failures, {secs:.2f}s (<60s)")
    assert ok, r.counterexample


def test_6_relation_chain_monotonicity():
    cfg = ExperimentConfig(cases=1000, window=200, k_max=4)
    res, secs = timed("relations", cfg, ["chain_monotonicity", "splus_phi_and_eps_runs"])
    ok = all(r.passed and r.cases >= 1000 for r in res.values())
    detail = ", ".join(f"{n} {r.cases} pairs/{r.failures} failures" for n, r in res.items())
    record(6, "chain monotonicity", ok, f"{detail}, {secs:.2f}s")
    assert ok


def test_7_construction_soundness():
    names = ["escaping_g_sound", "intervals_sound", "meabou_disjoint_blocks", "splusphi_perfect_oracle"]
    res, secs = timed("constructions", ExperimentConfig(cases=200), names)
    ok = all(r.passed and r.cases >= 200 for r in res.values())
    detail = ", ".join(f"{n} {r.cases}/{r.failures}" for n, r in res.items())
    record(7, "constructions", ok, f"instances/failures: {detail}, {secs:.2f}s")
    assert ok


def test_8_monte_carlo_vs_exact():
    cfg = ExperimentConfig(mc_depth=5, mc_trials=100_000)
    res, secs = timed("measure", cfg, ["monte_carlo_vs_exact", "failure_bound_within_tail"])
    mc = res["monte_carlo_vs_exact"].detail
    bounds = res["failure_bound_within_tail"].detail
    ok = all(r.passed for r in res.values()) and secs < 60 and rn.tail_bound(1) == Fraction(1, 6)
    parts = []
    # the aligned family starting at l_1, plus the same family shifted by one point,
    # whose exact failure probability is nonzero
    for name in ("pairs", "shifted_pairs"):
        d = mc[name]
        exact = Fraction(d["exact"]["num"], d["exact"]["den"])
        ok &= d["deviation"] <= 3 * d["sigma"] and exact <= Fraction(1, 6)
        ok &= bounds[name]["bound"] == {"num": 1, "den": 6}
        parts.append(f"{name} rate {d['rate']:.5f} vs exact {float(exact):.5f} (|diff| {d['deviation']:.1e} <= 3 sigma {3 * d['sigma']:.1e})")
    record(8, "monte carlo", ok, f"depth 5, 1e5 trials, {'; '.join(parts)}, exact <= 1/6, {secs:.2f}s (<60s)")
    assert ok


def test_9_poset_sanity():
    res, secs = timed("creatures", ExperimentConfig(poset_cases=500), ["fragment_order", "pair_order"])
    ok = all(r.passed and r.cases >= 500 for r in res.values())
    detail = ", ".join(f"{n} {r.cases}/{r.failures}" for n, r in res.items())
    record(9, "poset sanity", ok, f"cases/failures: {detail} (pair_order includes the join), {secs:.2f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
