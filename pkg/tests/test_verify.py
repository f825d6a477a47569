import json

import numpy as np
import pytest

from cone_harmonics import gindikin_gamma
from cone_harmonics.verify import (
    SUITES,
    SuiteReport,
    gindikin_mc,
    jsonable,
    suite_a1,
    suite_a2,
    suite_a7,
    suite_a8,
    suite_a10,
    suite_restriction,
)


def test_jsonable_handles_numpy_and_complex():
    out = jsonable({"a": np.float64(1.5), "b": np.array([1 + 2j, 3.0]), "c": (np.int64(2), float("nan"))})
    assert out == {"a": 1.5, "b": [{"re": 1.0, "im": 2.0}, 3.0], "c": [2, "nan"]}
    json.dumps(out)


def test_report_json_excludes_timing():
    a = SuiteReport("X", "t", True, [{"passed": True}], {"seed": 1}, seconds=1.0)
    b = SuiteReport("X", "t", True, [{"passed": True}], {"seed": 1}, seconds=2.0)
    assert a.to_json() == b.to_json()
    assert a.line().startswith("X PASS")


def test_suites_registry_is_complete():
    assert list(SUITES) == [f"A{i}" for i in range(1, 11)]


def test_restriction_reduced():
    rep = suite_restriction(2, 1, 1, sweep=3, samples=20000, seed=1)
    assert rep.passed and len(rep.rows) == 3
    assert rep.seconds > 0


def test_a1_reduced_configs():
    rep = suite_a1(seed=2, sweep=1, samples=10**4, configs=((2, 1, 1), (2, 2, 1)))
    assert rep.passed
    assert {(r["r"], r["d"], r["l"]) for r in rep.rows} == {(2, 1, 1), (2, 2, 1)}


def test_a2_reduced():
    assert suite_a2(seed=3, trials=25).passed


def test_a7_reduced():
    assert suite_a7(seed=4, trials=1, samples=5000, configs=((3, 1, 2),)).passed


def test_a8_reduced():
    assert suite_a8(seed=5, trials=30).passed


@pytest.mark.parametrize("d", [1, 2])
def test_gindikin_mc_matches_product_formula(d):
    s = np.array([2.3, 1.9 + 0.3 * d])
    res = gindikin_mc(s, d, 2 * 10**5, seed=6)
    exact = gindikin_gamma(s, d)
    assert abs(res.value - exact) <= max(4 * res.stderr, 0.02 * abs(exact))


def test_a10_detects_nondeterminism():
    calls = iter(range(10))
    plan = {
        "stable": lambda s: SuiteReport("S", "stable", True, [{"v": s}]),
        "drifting": lambda s: SuiteReport("D", "drifting", True, [{"v": next(calls)}]),
    }
    rep = suite_a10(seed=0, plan=plan)
    assert not rep.passed
    assert [r["passed"] for r in rep.rows] == [True, False]


def test_a10_reduced_plan_is_deterministic():
    plan = {"A2": lambda s: suite_a2(s, trials=5), "A8": lambda s: suite_a8(s, trials=5)}
    assert suite_a10(seed=8, plan=plan).passed
