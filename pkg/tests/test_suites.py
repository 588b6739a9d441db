from __future__ import annotations

import json

import pytest

from finloc.errors import InvalidInstance
from finloc.suites import (
    REGISTRY,
    SUITES,
    ExperimentConfig,
    PropertyResult,
    property_names,
    run_suite,
)

SMALL = ExperimentConfig(
    cases=15, window=60, shrink_cases=2, upper_half_cases=15, poset_cases=15, mc_trials=2000, l_max=3
)


def _dump(rep) -> str:
    return "\n".join(json.dumps(line, sort_keys=True) for line in rep.lines())


def test_measure_suite_at_default_scale_passes():
    rep = run_suite("measure", ExperimentConfig())
    assert rep.passed
    names = {r.name for r in rep.results}
    assert {"tail_bound_closed_form", "partial_sums_below_bound"} <= names


def test_largeness_window_12_lmax_4_transfer_passes():
    rep = run_suite("largeness", ExperimentConfig(window=12, l_max=4), only=["transfer_oracle"])
    (res,) = rep.results
    assert res.passed
    # every (l, k, m) with l*m <= 8 and all 2^(lm) subsets
    params = res.detail["parameters"]
    assert [2, 0, 1] in params and [4, 2, 2] in params
    assert res.cases == sum(2 ** (l * m) for l, _, m in params)


@pytest.mark.parametrize("name", SUITES)
def test_every_suite_passes_at_small_scale(name):
    rep = run_suite(name, SMALL)
    bad = [r.to_json() for r in rep.results if not r.passed]
    assert rep.passed, bad
    assert len(rep.results) == len(REGISTRY[name])


def test_unknown_suite_and_property():
    with pytest.raises(InvalidInstance):
        run_suite("topology")
    with pytest.raises(InvalidInstance):
        run_suite("measure", SMALL, only=["no_such_property"])
    with pytest.raises(InvalidInstance):
        property_names("topology")


def test_reports_are_deterministic():
    for name in ("relations", "constructions"):
        assert _dump(run_suite(name, SMALL)) == _dump(run_suite(name, SMALL))


def test_parallel_batches_match_serial():
    cfg = ExperimentConfig(**{**SMALL.to_json(), "cases": 40, "batch_size": 10})
    serial = run_suite("constructions", cfg)
    par = run_suite("constructions", ExperimentConfig(**{**cfg.to_json(), "workers": 2}))
    assert _dump(serial) == _dump(par)


def test_timings_only_on_request():
    rep = run_suite("invariants", SMALL)
    assert all("seconds" not in line for line in rep.lines())
    assert all("seconds" in line for line in rep.lines(timings=True))


def test_report_lines_end_with_summary():
    rep = run_suite("relations", SMALL)
    lines = rep.lines()
    assert lines[-1]["summary"] and lines[-1]["all_pass"]
    assert lines[-1]["properties"] == len(lines) - 1


def test_failed_property_carries_counterexample():
    r = PropertyResult("x", "p", 3, 1, {"X": [1]})
    assert not r.passed and r.to_json()["counterexample"] == {"X": [1]}
    assert not PropertyResult("x", "p", 0, 0).passed


def test_config_json_round_trip_and_rejections():
    cfg = ExperimentConfig(seed=3, shrink_weights=[15, 16])
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(InvalidInstance):
        ExperimentConfig.from_json({"seed": 1, "colour": "red"})
    for bad in ({"cases": 0}, {"seed": -1}, {"l_max": 1}, {"shrink_weights": [14]},
                {"tail_m_max": 5, "tail_R_max": 4}, {"mc_depth": 9}):
        with pytest.raises(InvalidInstance):
            ExperimentConfig(**bad)
