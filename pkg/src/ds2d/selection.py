"""Source/interface selection under the Ds2D matching constraints.

A feasible assignment is a set of (source_id, interface) pairs in which
no sink interface serves two sources and no source uses two interfaces.
That also caps the number of links at the sink's interface count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .model import DomainError, Scenario, rate_for_level

MAX_ENUM_SOURCES = 12
MAX_ENUM_INTERFACES = 6

Pair = tuple[str, int]
Objective = Callable[[frozenset, Scenario], float]
Increment = Callable[[frozenset, Pair, Scenario], float]


@dataclass(frozen=True)
class Assignment:
    pairs: frozenset
    objective_value: float

    @property
    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)

    def constraint_violations(self, scenario: Scenario) -> list[str]:
        errs = []
        ifaces = [n for _, n in self.pairs]
        sids = [s for s, _ in self.pairs]
        if len(self.pairs) > len(set(scenario.sink.interfaces)):
            errs.append("more links than sink interfaces")
        if len(set(ifaces)) != len(ifaces):
            errs.append("a sink interface serves more than one source")
        if len(set(sids)) != len(sids):
            errs.append("a source transmits on more than one interface")
        return errs


def pair_rate(scenario: Scenario, pair: Pair) -> float:
    sid, n = pair
    return rate_for_level(scenario.rate_table, scenario.source(sid).rate_levels[n])


def aggregate_rate(pairs: frozenset, scenario: Scenario) -> float:
    """Default objective: total kbps over the chosen links."""
    # fsum is order-independent, so equal sets of rates tie exactly
    return math.fsum(pair_rate(scenario, p) for p in pairs)


def aggregate_rate_increment(pairs: frozenset, pair: Pair, scenario: Scenario) -> float:
    return pair_rate(scenario, pair)


def candidate_pairs(scenario: Scenario) -> list[Pair]:
    sink_ifaces = set(scenario.sink.interfaces)
    return sorted(
        (d.id, n)
        for d in scenario.sources
        for n in dict.fromkeys(d.interfaces)
        if n in sink_ifaces and n in d.rate_levels
    )


def within_guard(scenario: Scenario) -> bool:
    return (len(scenario.sources) <= MAX_ENUM_SOURCES
            and len(set(scenario.sink.interfaces)) <= MAX_ENUM_INTERFACES)


def enumerate_assignments(scenario: Scenario, objective: Objective = aggregate_rate) -> Iterator[Assignment]:
    """Yield every non-empty feasible assignment exactly once."""
    if not within_guard(scenario):
        raise DomainError(
            f"enumeration limited to {MAX_ENUM_SOURCES} sources and "
            f"{MAX_ENUM_INTERFACES} sink interfaces; use greedy_select for larger instances")
    ifaces = sorted(set(scenario.sink.interfaces))
    by_iface = {n: [s for s, m in candidate_pairs(scenario) if m == n] for n in ifaces}

    # Walk sink interfaces in order; each is either left idle or given to an unused source.
    def walk(k: int, used: frozenset, chosen: tuple) -> Iterator[tuple]:
        if k == len(ifaces):
            if chosen:
                yield chosen
            return
        n = ifaces[k]
        yield from walk(k + 1, used, chosen)
        for sid in by_iface[n]:
            if sid not in used:
                yield from walk(k + 1, used | {sid}, chosen + ((sid, n),))

    for chosen in walk(0, frozenset(), ()):
        pairs = frozenset(chosen)
        yield Assignment(pairs, objective(pairs, scenario))


def _better(a: Assignment, b: Assignment | None) -> bool:
    if b is None or a.objective_value > b.objective_value:
        return True
    return a.objective_value == b.objective_value and a.sorted_pairs < b.sorted_pairs


def exact_select(scenario: Scenario, objective: Objective = aggregate_rate) -> Assignment:
    best = None
    for a in enumerate_assignments(scenario, objective):
        if _better(a, best):
            best = a
    if best is None:
        raise DomainError("no feasible assignment: no source shares an interface with the sink")
    return best


def greedy_select(scenario: Scenario, increment: Increment = aggregate_rate_increment,
                  objective: Objective = aggregate_rate) -> Assignment:
    """Add the pair with the largest positive marginal gain until none is left."""
    chosen: set[Pair] = set()
    pool = candidate_pairs(scenario)
    while True:
        used_s = {s for s, _ in chosen}
        used_n = {n for _, n in chosen}
        best_gain, best_pair = 0.0, None
        frozen = frozenset(chosen)
        for pair in pool:
            if pair[0] in used_s or pair[1] in used_n:
                continue
            g = increment(frozen, pair, scenario)
            if g > best_gain:  # pool is sorted, so ties keep the smaller pair
                best_gain, best_pair = g, pair
        if best_pair is None:
            break
        chosen.add(best_pair)
    pairs = frozenset(chosen)
    return Assignment(pairs, objective(pairs, scenario) if pairs else 0.0)


def select_sources(scenario: Scenario, objective: Objective = aggregate_rate,
                   increment: Increment = aggregate_rate_increment) -> Assignment:
    """Best feasible assignment: exhaustive within the guard, greedy beyond it.

    Ties go to the lexicographically smallest sorted pair list.
    """
    if not candidate_pairs(scenario):
        raise DomainError("no feasible assignment: no source shares an interface with the sink")
    if within_guard(scenario):
        return exact_select(scenario, objective)
    return greedy_select(scenario, increment, objective)
