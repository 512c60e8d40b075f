"""
Choosing sources and interfaces
===============================

Each sink interface talks to at most one source and each source uses one
interface. The default objective maximises aggregate rate, which also
minimises the optimal latency.
"""

# %%
from ds2d.model import CANDIDATE_SOURCE, SINK, Device, Scenario
from ds2d.selection import enumerate_assignments, greedy_select, select_sources

sink = Device("D0", SINK, (1, 2))
sources = (
    Device("A", CANDIDATE_SOURCE, (1, 2), {1: 9, 2: 10}),
    Device("B", CANDIDATE_SOURCE, (1, 2), {1: 3, 2: 11}),
    Device("C", CANDIDATE_SOURCE, (2,), {2: 12}),
)
scn = Scenario(sink, sources)

# %%
# Every feasible assignment, best first.
for a in sorted(enumerate_assignments(scn), key=lambda a: -a.objective_value):
    print(f"{a.objective_value:8.1f} kbps  {a.sorted_pairs}")

# %%
# Exact versus greedy. Greedy grabs C on interface 2 first, then the best
# remaining source on interface 1.
print("exact :", select_sources(scn).sorted_pairs)
print("greedy:", greedy_select(scn).sorted_pairs)

# %%
# A custom objective: favour using as few devices as possible while staying
# above 5 Mbps.
def few_devices(pairs, s):
    from ds2d.selection import aggregate_rate
    rate = aggregate_rate(pairs, s)
    return (rate >= 5000) * 1e6 - len(pairs) * 1e4 + rate

print("few devices:", select_sources(scn, few_devices).sorted_pairs)
