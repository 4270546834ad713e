import math

import pytest

from intercode import ConfigurationError, ReplayAdversary, exhaustive_adversary_search, monitor, sampled_adversary_search
from intercode.engine import RoundRecord
from intercode.erasure import ERASURE_6ARY
from intercode.feedback import ADAPTIVE_BINARY, ADAPTIVE_TERNARY, FIXED_TERNARY
from intercode.protocol import identity_exchange
from intercode.verify import enumerate_patterns, pattern_count
from oracles import patterns_up_to


def test_pattern_enumeration_is_complete_and_unique():
    pats = list(enumerate_patterns(6, 2, 2))
    assert len(pats) == len(set(pats)) == patterns_up_to(6, 2, 2) == pattern_count(6, 2, 2)
    assert pats[0] == () and pats[1] == ((0, 0),) and pats[2] == ((0, 1),)
    assert len(list(enumerate_patterns(16, 4, 1, min_size=4))) == math.comb(16, 4) == 1820


def test_budget_zero_tests_only_the_empty_pattern():
    out = exhaustive_adversary_search(FIXED_TERNARY, identity_exchange(8), "0110", "1011", 0, epsilon="1/8")
    assert out.patterns_tested == 1 and out.ok


def test_fixed_ternary_exhaustive():
    out = exhaustive_adversary_search("fixed-ternary", identity_exchange(8), "0110", "1011", 2, epsilon="1/8")
    assert out.patterns_tested == patterns_up_to(16, 2, 2) == 513
    assert out.first_failure is None and out.ok


def test_erasure_exhaustive_counts():
    inst = ERASURE_6ARY.instance(identity_exchange(4), "1/4")
    exact = exhaustive_adversary_search(inst, None, "01", "11", 4, min_size=4)
    assert exact.patterns_tested == 1820 and exact.ok


def test_cap_refuses_with_the_count(monkeypatch):
    monkeypatch.setenv("LAB_PATTERN_CAP", "100")
    with pytest.raises(ConfigurationError, match="513"):
        exhaustive_adversary_search(FIXED_TERNARY, identity_exchange(8), "0110", "1011", 2, epsilon="1/8")


@pytest.mark.parametrize("scheme,n,eps,x,y,budget", [
    (FIXED_TERNARY, 8, "1/8", "0110", "1011", 4),
    (ADAPTIVE_TERNARY, 6, "1/6", "011", "110", 4),
    (ERASURE_6ARY, 4, "1/4", "01", "10", 8),
], ids=["fixed-ternary", "adaptive-ternary", "erasure-6ary"])
def test_budget_at_the_threshold_breaks_the_scheme(scheme, n, eps, x, y, budget):
    out = exhaustive_adversary_search(scheme, identity_exchange(n), x, y, budget, epsilon=eps, stop_at_first=True)
    assert out.first_failure is not None


def test_first_failure_is_reproducible():
    args = (FIXED_TERNARY, identity_exchange(8), "0110", "1011", 4)
    a = exhaustive_adversary_search(*args, epsilon="1/8", stop_at_first=True)
    b = exhaustive_adversary_search(*args, epsilon="1/8", stop_at_first=True)
    assert a.first_failure == b.first_failure
    r = FIXED_TERNARY.instance(identity_exchange(8), "1/8").run("0110", "1011", ReplayAdversary(a.first_failure), 4)
    assert not r.success


def test_sampled_search_without_trials_runs_the_greedy_adversaries():
    out = sampled_adversary_search(ADAPTIVE_BINARY, identity_exchange(4), "01", "10", trials=0, epsilon="1/4")
    assert out.patterns_tested == 4 and out.ok


def test_sampled_search_is_deterministic():
    args = (FIXED_TERNARY, identity_exchange(8), "0110", "1011", 5)
    a = sampled_adversary_search(*args, trials=50, seed=3, epsilon="1/8")
    b = sampled_adversary_search(*args, trials=50, seed=3, epsilon="1/8")
    assert a.to_json() == b.to_json() and a.failures > 0


def test_monitor_is_quiet_on_zero_noise_runs():
    for scheme, n, eps in [(FIXED_TERNARY, 8, "1/8"), (ADAPTIVE_BINARY, 4, "1/4"), (ERASURE_6ARY, 4, "1/4")]:
        inst = scheme.instance(identity_exchange(n), eps)
        assert monitor(inst.run("0" * (n // 2), "1" * (n // 2)).trace) == []


def test_monitor_flags_a_hand_built_discrepancy():
    trace = ERASURE_6ARY.instance(identity_exchange(4), "1/4").run("01", "10").trace
    trace.records = [RoundRecord(0, "A", (0, 1), (0, 1), 1, 0, "send", (0,), ()),
                     RoundRecord(1, "B", (1, 1), (1, 1), 2, 0, "send", (0, 1), ())]
    names = {v.invariant for v in monitor(trace)}
    assert "discrepancy-bound" in names


def test_monitor_flags_budget_overrun():
    trace = FIXED_TERNARY.instance(identity_exchange(8), "1/8").run("0110", "1011", ReplayAdversary({0: 0})).trace
    trace.budget = 0
    assert any(v.invariant == "budget-soundness" for v in monitor(trace))


def test_monitor_flags_transcript_disagreement():
    trace = FIXED_TERNARY.instance(identity_exchange(8), "1/8").run("0110", "1011").trace
    trace.records[3].t_b = (1,)
    assert [v.invariant for v in monitor(trace)] == ["transcript-consensus"]


def test_search_outcome_serializes():
    out = exhaustive_adversary_search(FIXED_TERNARY, identity_exchange(8), "0110", "1011", 4, epsilon="1/8",
                                      stop_at_first=True)
    data = out.to_json()
    assert data["mode"] == "exhaustive" and data["first_failure"] == [list(p) for p in out.first_failure]
