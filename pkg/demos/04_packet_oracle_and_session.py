"""
Packet-level check of the latency formula, and a session walk-through
=====================================================================
"""

# %%
# Simulate an optimal plan packet by packet and compare with the closed form.
from ds2d import (
    FileSpec, SessionEvent, SessionState, advance_session, default_scenario, ftl, optimal_split,
    select_sources, simulate_packet_transfer,
)

scn = default_scenario()
links = [scn.link("D1", 1), scn.link("D2", 2)]
plan = optimal_split(links, scn.file)
trace = simulate_packet_transfer(plan)
print("closed form:", ftl(plan).ftl, "s   simulated:", trace.finish, "s")
print("first five deliveries:", list(zip(trace.times[:5].round(4), trace.link_index[:5])))

# %%
# Drive a session through its lifecycle with a small file.
small = optimal_split(links, FileSpec(12, 12_000))
state = SessionState()
for ev in [
    SessionEvent("start_discovery"),
    SessionEvent("discovery_complete"),
    SessionEvent("sources_selected", assignment=select_sources(scn)),
    SessionEvent("split_assigned", plan=small),
    SessionEvent("packet_received", count=5),
    SessionEvent("packet_received", count=7),
    SessionEvent("reassembled"),
]:
    state = advance_session(state, ev)
    print(f"{ev.kind:20s} -> {state.phase:16s} received={state.received_packets}")

# %%
# Decentralised set-up: the devices emit the events themselves.
state = advance_session(SessionState(), SessionEvent("start_discovery", origin="device"))
print(state.phase, "started by", state.last_origin)
