"""Packet-level simulation, Monte Carlo over random splits, level sweeps and
the Ds2D session lifecycle.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import split as sp
from .green import GreenReport, green_report
from .model import DomainError, Link, Scenario, rate_for_level
from .selection import Assignment, select_sources

MC_BLOCK = 10_000
HIST_BINS = 50

D2D, MULTIHOMING, OPTIMAL, RANDOM = "d2d", "multihoming", "optimal", "random"
SCHEMES = (D2D, MULTIHOMING, OPTIMAL, RANDOM)


# --------------------------------------------------------------------------
# packet-level oracle

@dataclass(frozen=True)
class PacketTrace:
    """Per-packet delivery events of a plan.

    ``times``, ``link_index`` and ``packet_index`` are parallel arrays sorted
    by time (empty when events were not recorded). ``completion`` gives the
    finishing time of each allocation in plan order.
    """

    links: tuple[Link, ...]
    completion: tuple[float, ...]
    times: np.ndarray = field(repr=False)
    link_index: np.ndarray = field(repr=False)
    packet_index: np.ndarray = field(repr=False)

    @property
    def completion_per_link(self) -> dict[Link, float]:
        return dict(zip(self.links, self.completion))

    @property
    def finish(self) -> float:
        return max(self.completion)


def simulate_packet_transfer(plan: sp.SplitPlan, record_events: bool = True) -> PacketTrace:
    """Send each link's packets back to back from t=0, one serialisation time apiece."""
    per_link_times = []
    completion = []
    for link, n in plan.allocations:
        step = plan.bits_per_packet / link.rate_bps
        t = np.cumsum(np.full(n, step))
        completion.append(float(t[-1]) if n else 0.0)
        if record_events:
            per_link_times.append(t)
    if record_events and per_link_times:
        times = np.concatenate(per_link_times)
        link_idx = np.concatenate([np.full(len(t), i) for i, t in enumerate(per_link_times)])
        pkt_idx = np.concatenate([np.arange(len(t)) for t in per_link_times])
        order = np.argsort(times, kind="stable")
        times, link_idx, pkt_idx = times[order], link_idx[order], pkt_idx[order]
    else:
        times = np.empty(0)
        link_idx = pkt_idx = np.empty(0, dtype=int)
    return PacketTrace(tuple(plan.links), tuple(completion), times, link_idx, pkt_idx)


# --------------------------------------------------------------------------
# Monte Carlo over random splits

def largest_remainder_rows(shares: np.ndarray, total: int) -> np.ndarray:
    """Row-wise largest-remainder rounding of an (m, N) share matrix."""
    shares = shares / shares.sum(axis=1, keepdims=True)
    exact = shares * total
    counts = np.floor(exact)
    left = (total - counts.sum(axis=1)).astype(int)
    order = np.argsort(-(exact - counts), axis=1, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(shares.shape[1])[None, :].repeat(len(shares), 0), axis=1)
    counts += rank < left[:, None]
    return counts.astype(np.int64)


def _random_share_rows(n_links: int, m: int, rng: np.random.Generator) -> np.ndarray:
    if n_links == 1:
        return np.ones((m, 1))
    if n_links == 2:
        a = rng.random(m)
        return np.column_stack([a, 1.0 - a])
    return rng.dirichlet(np.ones(n_links), size=m)


@dataclass(frozen=True)
class MonteCarloResult:
    mean: float
    stderr: float | None
    hist_counts: tuple[int, ...]
    hist_edges: tuple[float, ...]
    mean_alpha: float
    draws: int


def _mc_block(seed: int, k: int, m: int, rates: np.ndarray, total: int, bits: int):
    rng = np.random.default_rng([seed, k])
    shares = _random_share_rows(len(rates), m, rng)
    counts = largest_remainder_rows(shares, total)
    return sp.ftl_many(counts, rates, bits), shares[:, 0]


def run_monte_carlo(scenario: Scenario, links: Sequence[Link], draws: int, seed: int,
                    workers: int = 1) -> MonteCarloResult:
    """Mean FTL of ``draws`` independent random splits.

    Draws are cut into fixed blocks of MC_BLOCK, block k seeded from
    (seed, k), so the result does not depend on ``workers``.
    """
    if draws < 1:
        raise DomainError("draws must be >= 1")
    if not links:
        raise DomainError("at least one link is required")
    rates = np.array([link.rate_kbps for link in links])
    f = scenario.file
    sizes = [min(MC_BLOCK, draws - s) for s in range(0, draws, MC_BLOCK)]
    jobs = [(seed, k, m, rates, f.packet_count, f.bits_per_packet) for k, m in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _mc_block(*a), jobs))
    else:
        parts = [_mc_block(*a) for a in jobs]
    t = np.concatenate([p[0] for p in parts])
    alpha = np.concatenate([p[1] for p in parts])
    stderr = float(t.std(ddof=1) / math.sqrt(draws)) if draws > 1 else None
    counts, edges = np.histogram(t, bins=HIST_BINS, range=(t.min(), t.max()))
    return MonteCarloResult(float(t.mean()), stderr, tuple(int(c) for c in counts),
                            tuple(float(e) for e in edges), float(alpha.mean()), draws)


# --------------------------------------------------------------------------
# rate-level sweeps

@dataclass(frozen=True)
class SweepRow:
    level: int
    scheme: str
    alpha_first_link: float
    ftl_s: float
    gain_vs_d2d: float
    green: GreenReport
    mc_mean_s: float | None = None
    mc_stderr_s: float | None = None
    expected_ftl_s: float | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def row(self, level: int, scheme: str) -> SweepRow:
        for r in self.rows:
            if r.level == level and r.scheme == scheme:
                return r
        raise KeyError((level, scheme))

    def column(self, scheme: str, name: str) -> list:
        return [getattr(r, name) for r in self.rows if r.scheme == scheme]


def ds2d_links(scenario: Scenario, assignment: Assignment | None = None,
               first: tuple[str, int] | None = None) -> list[Link]:
    """Links of the selected assignment, with ``first`` (if chosen) leading."""
    assignment = assignment or select_sources(scenario)
    pairs = sorted(assignment.pairs, key=lambda p: (p != first, p))
    return [scenario.link(s, n) for s, n in pairs]


def _level_seed(seed: int, level: int) -> int:
    return int(np.random.SeedSequence([seed, level]).generate_state(1, np.uint64)[0])


def _sweep_level(scenario: Scenario, varied: tuple[str, int], level: int,
                 schemes: Sequence[str], mc_draws: int, seed: int) -> list[SweepRow]:
    scn = scenario.with_level(*varied, level)
    f = scn.file
    base_link = scn.link(*varied)
    t_d2d = sp.ftl(sp.single_link_plan(base_link, f)).ftl
    links = ds2d_links(scn, first=varied)
    rows = []
    for scheme in schemes:
        extra = {}
        if scheme == D2D:
            t, alpha, active = t_d2d, 1.0, 1
        elif scheme == MULTIHOMING:
            mh = sp.multihoming_links(scn.source(varied[0]), scn.sink, scn.rate_table)
            mh.sort(key=lambda link: link.interface != varied[1])
            t = sp.ftl(sp.optimal_split(mh, f, sp.MULTIHOMING)).ftl
            alpha, active = sp.optimal_shares(mh)[0], len(mh)
        elif scheme == OPTIMAL:
            t = sp.ftl(sp.optimal_split(links, f)).ftl
            alpha, active = sp.optimal_shares(links)[0], 1
        elif scheme == RANDOM:
            expected = None
            if len(links) == 2:
                expected = sp.expected_random_ftl_two_links(links[0].rate_kbps, links[1].rate_kbps, f)
            mc = None
            if mc_draws > 0:
                mc = run_monte_carlo(scn, links, mc_draws, _level_seed(seed, level))
                extra = dict(mc_mean_s=mc.mean, mc_stderr_s=mc.stderr)
            if expected is None and mc is None:
                raise DomainError("random scheme needs mc_draws > 0 unless exactly two links are used")
            t = expected if expected is not None else mc.mean
            alpha = mc.mean_alpha if mc is not None else 0.5
            active = 1
            extra["expected_ftl_s"] = expected
        else:
            raise DomainError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
        report = green_report(scn, sp.TransferOutcome((), t), active)
        rows.append(SweepRow(level, scheme, alpha, t, sp.relative_gain(t, t_d2d), report, **extra))
    return rows


def sweep_rate_levels(scenario: Scenario, varied: tuple[str, int] | None = None,
                      levels: Sequence[int] = range(1, 16), schemes: Sequence[str] = SCHEMES,
                      mc_draws: int = 0, seed: int | None = None, workers: int = 1) -> SweepResult:
    """Vary one (source, interface) level and evaluate every scheme at each level.

    The baseline for ``gain_vs_d2d`` is the varied link on its own. Random
    splits report the closed-form mean FTL when two links are in play and the
    Monte Carlo mean otherwise.
    """
    varied = varied or scenario.varied_link
    seed = scenario.economics.random_seed if seed is None else seed
    sid, n = varied
    if n not in scenario.source(sid).interfaces:
        raise DomainError(f"source {sid!r} has no interface {n}")
    for lvl in levels:
        rate_for_level(scenario.rate_table, lvl)
    for s in schemes:
        if s not in SCHEMES:
            raise DomainError(f"unknown scheme {s!r}; expected one of {SCHEMES}")

    def job(lvl):
        return _sweep_level(scenario, varied, lvl, schemes, mc_draws, seed)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            per_level = list(pool.map(job, levels))
    else:
        per_level = [job(lvl) for lvl in levels]
    return SweepResult(tuple(r for rows in per_level for r in rows))


# --------------------------------------------------------------------------
# session lifecycle

PHASES = ("idle", "discovery", "selection", "split_assignment",
          "transferring", "aggregating", "complete", "aborted")
TERMINAL = ("complete", "aborted")
ORIGINS = ("network", "device")  # centralized vs decentralized set-up


class ProtocolError(RuntimeError):
    def __init__(self, phase: str, event: str, detail: str = ""):
        self.phase, self.event = phase, event
        msg = f"event {event!r} not allowed in phase {phase!r}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True)
class SessionEvent:
    kind: str
    assignment: Assignment | None = None
    plan: sp.SplitPlan | None = None
    count: int = 1
    origin: str = "network"


@dataclass(frozen=True)
class SessionState:
    phase: str = "idle"
    assignment: Assignment | None = None
    plan: sp.SplitPlan | None = None
    received_packets: int = 0
    last_origin: str | None = None

    @property
    def expected_packets(self) -> int | None:
        return self.plan.packet_count if self.plan is not None else None


# phase -> event kind -> next phase
TRANSITIONS = {
    "idle": {"start_discovery": "discovery"},
    "discovery": {"discovery_complete": "selection"},
    "selection": {"sources_selected": "split_assignment"},
    "split_assignment": {"split_assigned": "transferring"},
    "transferring": {"packet_received": "transferring"},
    "aggregating": {"reassembled": "complete"},
}


def advance_session(state: SessionState, event: SessionEvent) -> SessionState:
    """Apply one lifecycle event; illegal ones raise ProtocolError."""
    phase, kind = state.phase, event.kind
    if event.origin not in ORIGINS:
        raise ProtocolError(phase, kind, f"unknown origin {event.origin!r}")
    if phase in TERMINAL:
        raise ProtocolError(phase, kind, "session already ended")
    if kind == "abort":
        return replace(state, phase="aborted", last_origin=event.origin)
    nxt = TRANSITIONS[phase].get(kind)
    if nxt is None:
        raise ProtocolError(phase, kind)
    state = replace(state, last_origin=event.origin)

    if kind == "sources_selected":
        if event.assignment is None or not event.assignment.pairs:
            raise ProtocolError(phase, kind, "a non-empty assignment is required")
        return replace(state, phase=nxt, assignment=event.assignment)
    if kind == "split_assigned":
        plan = event.plan
        if plan is None or plan.packet_count < 1:
            raise ProtocolError(phase, kind, "a plan carrying at least one packet is required")
        keys = {(link.source_id, link.interface) for link in plan.links}
        if not keys <= set(state.assignment.pairs):
            raise ProtocolError(phase, kind, "plan uses links outside the assignment")
        return replace(state, phase=nxt, plan=plan)
    if kind == "packet_received":
        if event.count < 1:
            raise ProtocolError(phase, kind, "count must be >= 1")
        got = state.received_packets + event.count
        if got > state.expected_packets:
            raise ProtocolError(phase, kind, f"{got} packets exceed the file's {state.expected_packets}")
        return replace(state, received_packets=got,
                       phase="aggregating" if got == state.expected_packets else nxt)
    return replace(state, phase=nxt)
