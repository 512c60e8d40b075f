"""
Packet split and file transfer latency across rate levels
==========================================================

Source D1 is swept over SINR levels 1..15 on interface 1 while D2 stays at
level 6 (1646.1 kbps) on interface 2. We look at the optimal share of D1,
the resulting latency, and the gain over sending the whole file from D1.
"""

# %%
# Sweep the bundled two-source scenario.
from ds2d import default_scenario, sweep_rate_levels

scn = default_scenario()
res = sweep_rate_levels(scn, schemes=["d2d", "optimal", "random"], mc_draws=20_000, seed=1)

# %%
# The optimal share of D1 grows with its rate and reaches 1/2 at level 6,
# where both links are equally fast.
levels = list(range(1, 16))
alpha = res.column("optimal", "alpha_first_link")
for lvl, a in zip(levels, alpha):
    print(f"level {lvl:2d}: D1 carries {a:6.1%} of the packets")

# %%
# Latency and relative gain. The random split's expected latency comes from
# the closed form; the Monte Carlo mean is kept alongside for comparison.
print(f"{'lvl':>3} {'d2d_s':>9} {'opt_s':>8} {'rand_s':>8} {'mc_s':>8} {'gain_opt':>9} {'gain_rand':>9}")
for lvl in levels:
    d, o, r = (res.row(lvl, s) for s in ("d2d", "optimal", "random"))
    print(f"{lvl:3d} {d.ftl_s:9.1f} {o.ftl_s:8.1f} {r.ftl_s:8.1f} {r.mc_mean_s:8.1f} "
          f"{o.gain_vs_d2d:9.3f} {r.gain_vs_d2d:9.3f}")

# %%
# Random splitting turns into a loss once D1 alone beats the expected random
# latency: between levels 7 and 8 here.
crossover = next(lvl for lvl in levels if res.row(lvl, "random").gain_vs_d2d < 0)
print("random split first loses against D2D at level", crossover)

# %%
# Plot, if matplotlib is around.
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(1, 3, figsize=(13, 3.5))
    ax[0].plot(levels, alpha, "o-")
    ax[0].set(xlabel="rate level of D1", ylabel="share of D1", title="optimal split")
    for s in ("d2d", "optimal", "random"):
        ax[1].semilogy(levels, res.column(s, "ftl_s"), "o-", label=s)
        if s != "d2d":
            ax[2].plot(levels, res.column(s, "gain_vs_d2d"), "o-", label=s)
    ax[1].set(xlabel="rate level of D1", ylabel="FTL (s)", title="latency")
    ax[2].axhline(0, color="k", lw=0.5)
    ax[2].set(xlabel="rate level of D1", ylabel="gain vs D2D", title="relative gain")
    ax[1].legend(), ax[2].legend()
    fig.tight_layout()
    fig.savefig("split_and_latency.png", dpi=120)
