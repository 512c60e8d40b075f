import numpy as np
import pytest
from hypothesis import given, strategies as st

from ds2d.model import DomainError, FileSpec, Link, default_scenario
from ds2d.selection import select_sources
from ds2d.split import SplitPlan, expected_random_ftl_two_links, ftl, largest_remainder, optimal_split
from ds2d.simkit import (
    HIST_BINS, ProtocolError, SessionEvent, SessionState, advance_session, largest_remainder_rows,
    run_monte_carlo, simulate_packet_transfer, sweep_rate_levels,
)

F = FileSpec()
L1 = Link("D1", 1, 213.3)
L6 = Link("D2", 2, 1646.1)


# --- packet oracle -------------------------------------------------------

def test_trace_matches_closed_form():
    plan = optimal_split([L1, L6], F)
    trace = simulate_packet_transfer(plan)
    assert abs(trace.finish - ftl(plan).ftl) < 1e-6
    assert len(trace.times) == 55_000
    assert (np.diff(trace.times) >= 0).all()
    for i, (link, n) in enumerate(plan.allocations):
        idx = trace.packet_index[trace.link_index == i]
        assert (idx == np.arange(n)).all()
        assert trace.completion_per_link[link] == pytest.approx(n * 12_000 / link.rate_bps, rel=1e-12)


def test_trace_trivial_cases():
    one = SplitPlan(((Link("A", 1, 12.0), 1),), "d2d_single", 12_000)
    assert simulate_packet_transfer(one).finish == 1.0
    idle = SplitPlan(((Link("A", 1, 12.0), 3), (Link("B", 2, 5.0), 0)), "ds2d_random", 12_000)
    tr = simulate_packet_transfer(idle)
    assert tr.completion == (3.0, 0.0)


@given(st.lists(st.tuples(st.floats(1, 1e4), st.integers(0, 5000)), min_size=1, max_size=5),
       st.integers(8, 12_000))
def test_oracle_equivalence_property(spec, bits):
    links = [Link(f"S{i}", i + 1, r) for i, (r, _) in enumerate(spec)]
    plan = SplitPlan(tuple(zip(links, [p for _, p in spec])), "ds2d_random", bits)
    t = ftl(plan).ftl
    sim = simulate_packet_transfer(plan).finish
    assert abs(sim - t) <= 1e-6 * max(t, 1e-300)


# --- Monte Carlo -----------------------------------------------------------

def test_vector_rounding_matches_scalar():
    rng = np.random.default_rng(0)
    shares = rng.dirichlet(np.ones(4), size=500)
    rows = largest_remainder_rows(shares, 55_000)
    for s, r in zip(shares, rows):
        assert list(r) == largest_remainder(list(s), 55_000)
    assert (largest_remainder_rows(np.array([[1.0, 1.0, 1.0]]), 4) == [[2, 1, 1]]).all()


def test_mc_level2_vs_closed_form():
    scn = default_scenario(level=2)
    links = [scn.link("D1", 1), scn.link("D2", 2)]
    res = run_monte_carlo(scn, links, 100_000, seed=1)
    assert abs(res.mean - 1038.81045809924) < 3 * res.stderr
    assert sum(res.hist_counts) == 100_000 and len(res.hist_counts) == HIST_BINS
    assert res.mean_alpha == pytest.approx(0.5, abs=0.01)


def test_mc_single_draw_and_determinism():
    scn = default_scenario()
    links = [L1, L6]
    one = run_monte_carlo(scn, links, 1, seed=3)
    assert one.stderr is None
    a = run_monte_carlo(scn, links, 25_000, seed=9)
    b = run_monte_carlo(scn, links, 25_000, seed=9, workers=4)
    assert a == b
    with pytest.raises(DomainError):
        run_monte_carlo(scn, links, 0, seed=1)


def test_mc_converges():
    scn = default_scenario()
    exact = expected_random_ftl_two_links(213.3, 1646.1, F)
    small = run_monte_carlo(scn, [L1, L6], 1_000, seed=4)
    big = run_monte_carlo(scn, [L1, L6], 100_000, seed=4)
    assert abs(small.mean - exact) < 3 * small.stderr
    assert abs(big.mean - exact) < 3 * big.stderr
    assert big.stderr < small.stderr / 5


def test_mc_three_links_runs():
    scn = default_scenario()
    res = run_monte_carlo(scn, [L1, L6, Link("D3", 3, 842.2)], 5_000, seed=2)
    assert res.mean_alpha == pytest.approx(1 / 3, abs=0.02)


# --- sweeps ---------------------------------------------------------------

def test_sweep_gain_endpoints():
    res = sweep_rate_levels(default_scenario(), levels=range(1, 11), schemes=["optimal", "d2d"])
    gains = res.column("optimal", "gain_vs_d2d")
    assert gains[0] == pytest.approx(0.885, abs=0.01)
    assert gains[-1] == pytest.approx(0.301, abs=0.01)
    assert all(a >= b for a, b in zip(gains, gains[1:]))
    assert len(res.rows) == 20


def test_sweep_energy_reduction_level2():
    res = sweep_rate_levels(default_scenario(), levels=[2], schemes=["d2d", "optimal", "random"])
    e_d2d = res.row(2, "d2d").green.energy_wh
    assert 1 - res.row(2, "optimal").green.energy_wh / e_d2d == pytest.approx(0.834, abs=1e-3)
    assert 1 - res.row(2, "random").green.energy_wh / e_d2d == pytest.approx(0.483, abs=1e-3)


def test_random_gain_sign_change():
    res = sweep_rate_levels(default_scenario(), levels=[7, 8], schemes=["random"])
    assert res.row(7, "random").gain_vs_d2d > 0
    assert res.row(8, "random").gain_vs_d2d < 0


def test_sweep_multihoming_and_symmetry():
    res = sweep_rate_levels(default_scenario(), levels=[6], schemes=["multihoming", "optimal"])
    mh, opt = res.row(6, "multihoming"), res.row(6, "optimal")
    assert opt.alpha_first_link == 0.5
    assert mh.ftl_s == opt.ftl_s
    assert mh.green.energy_wh == 2 * opt.green.energy_wh


def test_battery_life_nondecreasing_in_level():
    res = sweep_rate_levels(default_scenario(), schemes=["optimal"])
    life = res.column("optimal", "green")
    assert all(a.battery_life_h <= b.battery_life_h for a, b in zip(life, life[1:]))


def test_sweep_deterministic_and_parallel():
    kw = dict(levels=[1, 4, 9], mc_draws=3_000, seed=5)
    a = sweep_rate_levels(default_scenario(), **kw)
    b = sweep_rate_levels(default_scenario(), workers=3, **kw)
    assert a == b
    r = a.row(1, "random")
    assert r.mc_mean_s is not None and r.expected_ftl_s == r.ftl_s


def test_sweep_errors():
    with pytest.raises(DomainError):
        sweep_rate_levels(default_scenario(), varied=("D9", 1))
    with pytest.raises(DomainError):
        sweep_rate_levels(default_scenario(), varied=("D2", 1))
    with pytest.raises(DomainError):
        sweep_rate_levels(default_scenario(), levels=[0])
    with pytest.raises(DomainError):
        sweep_rate_levels(default_scenario(), schemes=["nope"])


# --- session lifecycle ------------------------------------------------------

def ready_to_transfer(p=10):
    scn = default_scenario()
    assignment = select_sources(scn)
    plan = optimal_split([scn.link("D1", 1), scn.link("D2", 2)], FileSpec(p, 12_000))
    s = SessionState()
    for ev in [SessionEvent("start_discovery"), SessionEvent("discovery_complete"),
               SessionEvent("sources_selected", assignment=assignment),
               SessionEvent("split_assigned", plan=plan)]:
        s = advance_session(s, ev)
    return s


def test_happy_path():
    s = advance_session(SessionState(), SessionEvent("start_discovery"))
    assert s.phase == "discovery" and s.plan is None
    s = ready_to_transfer(10)
    assert s.phase == "transferring" and s.plan is not None
    for _ in range(9):
        s = advance_session(s, SessionEvent("packet_received"))
    assert s.phase == "transferring"
    s = advance_session(s, SessionEvent("packet_received"))
    assert s.phase == "aggregating" and s.received_packets == 10
    s = advance_session(s, SessionEvent("reassembled", origin="device"))
    assert s.phase == "complete" and s.last_origin == "device"


def test_illegal_events():
    s = advance_session(SessionState(), SessionEvent("start_discovery"))
    with pytest.raises(ProtocolError) as e:
        advance_session(s, SessionEvent("packet_received"))
    assert (e.value.phase, e.value.event) == ("discovery", "packet_received")
    with pytest.raises(ProtocolError):
        advance_session(ready_to_transfer(5), SessionEvent("packet_received", count=6))
    with pytest.raises(ProtocolError):
        advance_session(ready_to_transfer(5), SessionEvent("reassembled"))
    with pytest.raises(ProtocolError):
        advance_session(SessionState(), SessionEvent("start_discovery", origin="martian"))


def test_abort_from_any_open_phase():
    s = ready_to_transfer()
    aborted = advance_session(s, SessionEvent("abort"))
    assert aborted.phase == "aborted"
    with pytest.raises(ProtocolError):
        advance_session(aborted, SessionEvent("start_discovery"))


KINDS = ["start_discovery", "discovery_complete", "sources_selected", "split_assigned",
         "packet_received", "reassembled", "abort"]


@given(st.lists(st.tuples(st.sampled_from(KINDS), st.integers(1, 4)), max_size=40))
def test_never_complete_without_all_packets(events):
    scn = default_scenario()
    assignment = select_sources(scn)
    plan = optimal_split([scn.link("D1", 1), scn.link("D2", 2)], FileSpec(7, 12_000))
    s = SessionState()
    for kind, count in events:
        ev = SessionEvent(kind, assignment=assignment, plan=plan, count=count)
        try:
            s = advance_session(s, ev)
        except ProtocolError:
            continue
        if s.phase in ("idle", "discovery", "selection"):
            assert s.plan is None
        assert s.received_packets <= 7
        if s.phase == "complete":
            assert s.received_packets == 7
