import itertools
import random

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from ds2d.model import CANDIDATE_SOURCE, SINK, Device, DomainError, Scenario, default_scenario
from ds2d.selection import (
    Assignment, aggregate_rate, candidate_pairs, enumerate_assignments, exact_select,
    greedy_select, pair_rate, select_sources,
)


def scenario(sink_ifaces, sources):
    """sources: {id: {interface: level}}"""
    devs = tuple(Device(sid, CANDIDATE_SOURCE, tuple(lv), lv) for sid, lv in sources.items())
    return Scenario(Device("D0", SINK, tuple(sink_ifaces)), devs)


def powerset_optimum(scn):
    """Brute force over every subset of candidate pairs, filtered for feasibility."""
    pairs = candidate_pairs(scn)
    best = None
    for k in range(1, min(len(set(scn.sink.interfaces)), len(scn.sources)) + 1):
        for combo in itertools.combinations(pairs, k):
            if len({s for s, _ in combo}) < k or len({n for _, n in combo}) < k:
                continue
            val = aggregate_rate(frozenset(combo), scn)
            key = (-val, sorted(combo))
            if best is None or key < best:
                best = key
    return best


def random_instance(rng):
    n_ifaces = rng.randint(1, 4)
    sources = {}
    for i in range(rng.randint(1, 6)):
        ifaces = rng.sample(range(1, n_ifaces + 2), rng.randint(1, n_ifaces))
        sources[f"S{i:02d}"] = {n: rng.randint(1, 15) for n in ifaces}
    return scenario(range(1, n_ifaces + 1), sources)


def test_two_by_two_enumeration():
    scn = scenario([1, 2], {"A": {1: 3, 2: 4}, "B": {1: 5, 2: 6}})
    got = [a.sorted_pairs for a in enumerate_assignments(scn)]
    # 4 single links plus the 2 perfect matchings
    assert len(got) == 6
    assert len({tuple(p) for p in got}) == 6
    assert sum(len(p) == 2 for p in got) == 2


def test_one_by_one_and_no_common_interface():
    assert len(list(enumerate_assignments(scenario([1], {"A": {1: 1}})))) == 1
    none = scenario([1], {"A": {2: 1}})
    assert list(enumerate_assignments(none)) == []
    with pytest.raises(DomainError):
        select_sources(none)


def test_guard():
    big = scenario([1], {f"S{i}": {1: 1} for i in range(13)})
    with pytest.raises(DomainError, match="greedy_select"):
        next(enumerate_assignments(big))
    a = select_sources(big)  # falls back to greedy
    assert a.sorted_pairs == [("S0", 1)]


def test_select_two_sources():
    scn = scenario([1, 2], {"A": {1: 6}, "B": {2: 1}})
    a = select_sources(scn)
    assert a.sorted_pairs == [("A", 1), ("B", 2)]
    assert a.objective_value == pytest.approx(1859.4)


def test_default_scenario_selects_both():
    a = select_sources(default_scenario())
    assert a.sorted_pairs == [("D1", 1), ("D2", 2)]


def test_dominance_and_ties():
    scn = scenario([1], {"A": {1: 3}, "B": {1: 9}, "C": {1: 4}})
    assert select_sources(scn).sorted_pairs == [("B", 1)]
    tie = scenario([1], {"B": {1: 5}, "A": {1: 5}})
    assert select_sources(tie).sorted_pairs == [("A", 1)]
    assert greedy_select(tie).sorted_pairs == [("A", 1)]


def test_all_rates_equal_fills_min():
    for n_if, n_src in [(2, 5), (4, 2), (3, 3)]:
        scn = scenario(range(1, n_if + 1), {f"S{i}": {n: 7 for n in range(1, n_if + 1)} for i in range(n_src)})
        assert len(greedy_select(scn).pairs) == min(n_if, n_src)
        assert len(select_sources(scn).pairs) == min(n_if, n_src)


def test_custom_objective():
    # prefer fewer links: reward a single fast pair over aggregate rate
    def fewest(pairs, scn):
        return max(pair_rate(scn, p) for p in pairs) - 1000 * len(pairs)
    scn = scenario([1, 2], {"A": {1: 6}, "B": {2: 1}})
    assert select_sources(scn, fewest).sorted_pairs == [("A", 1)]


def test_random_instances_against_oracles():
    rng = random.Random(11)
    for _ in range(1000):
        scn = random_instance(rng)
        if not candidate_pairs(scn):
            continue
        exact = select_sources(scn)
        greedy = greedy_select(scn)
        oracle = powerset_optimum(scn)
        assert exact.constraint_violations(scn) == []
        assert greedy.constraint_violations(scn) == []
        assert exact.objective_value == pytest.approx(-oracle[0])
        assert exact.sorted_pairs == oracle[1]
        assert exact.objective_value >= greedy.objective_value - 1e-9
        assert greedy.objective_value >= 0.5 * exact.objective_value

        # linear assignment gives the same optimum value
        ids = [d.id for d in scn.sources]
        ifaces = sorted(set(scn.sink.interfaces))
        w = np.zeros((len(ids), len(ifaces)))
        for s, n in candidate_pairs(scn):
            w[ids.index(s), ifaces.index(n)] = pair_rate(scn, (s, n))
        r, c = linear_sum_assignment(w, maximize=True)
        assert w[r, c].sum() == pytest.approx(exact.objective_value)


def test_adding_faster_source_never_hurts():
    rng = random.Random(5)
    for _ in range(200):
        scn = random_instance(rng)
        if not candidate_pairs(scn):
            continue
        before = exact_select(scn).objective_value
        n = rng.choice(scn.sink.interfaces)
        fast = Device("ZZ", CANDIDATE_SOURCE, (n,), {n: 15})
        after = exact_select(Scenario(scn.sink, scn.sources + (fast,))).objective_value
        assert after >= before


def test_constraint_check_flags_violations():
    scn = scenario([1], {"A": {1: 1}, "B": {1: 2}})
    bad = Assignment(frozenset({("A", 1), ("B", 1)}), 0.0)
    assert len(bad.constraint_violations(scn)) == 2
