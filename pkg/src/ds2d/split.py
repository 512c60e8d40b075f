"""Packet-split strategies and file transfer latency (FTL).

FTL of a plan is the time the slowest link needs for its share,
``max_n P_n * B / R_n``. Rates are in kbps (1 kbps = 1000 bit/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Device, DomainError, FileSpec, Link, RateTable, rate_for_level

D2D_SINGLE = "d2d_single"
MULTIHOMING = "multihoming"
DS2D_OPTIMAL = "ds2d_optimal"
DS2D_RANDOM = "ds2d_random"
SCHEME_TAGS = (D2D_SINGLE, MULTIHOMING, DS2D_OPTIMAL, DS2D_RANDOM)


@dataclass(frozen=True)
class SplitPlan:
    allocations: tuple[tuple[Link, int], ...]
    scheme_tag: str
    bits_per_packet: int = FileSpec().bits_per_packet

    def __post_init__(self):
        allocs = tuple((link, int(p)) for link, p in self.allocations)
        object.__setattr__(self, "allocations", allocs)
        if self.scheme_tag not in SCHEME_TAGS:
            raise DomainError(f"unknown scheme tag {self.scheme_tag!r}")
        if any(p < 0 for _, p in allocs):
            raise DomainError("packet counts must be >= 0")
        keys = [(link.source_id, link.interface) for link, _ in allocs]
        if len(set(keys)) != len(keys):
            raise DomainError("a link appears twice in the plan")
        if any(not link.rate_kbps > 0 for link, _ in allocs):
            raise DomainError("link rates must be > 0")

    @property
    def links(self) -> list[Link]:
        return [link for link, _ in self.allocations]

    @property
    def packets(self) -> list[int]:
        return [p for _, p in self.allocations]

    @property
    def packet_count(self) -> int:
        return sum(self.packets)


@dataclass(frozen=True)
class TransferOutcome:
    per_link_time: tuple[tuple[Link, float], ...]
    ftl: float


def _require_links(links: Sequence[Link]) -> None:
    if not links:
        raise DomainError("at least one link is required")
    if any(not link.rate_kbps > 0 for link in links):
        raise DomainError("link rates must be > 0")


def largest_remainder(shares: Sequence[float], total: int) -> list[int]:
    """Apportion ``total`` integer units proportionally to ``shares``.

    Shares are normalised first. Leftover units go to the largest fractional
    parts; equal fractions favour the lower index.
    """
    s = math.fsum(shares)
    if not s > 0:
        raise DomainError("shares must have a positive sum")
    exact = [total * x / s for x in shares]
    counts = [math.floor(e) for e in exact]
    left = total - sum(counts)
    order = sorted(range(len(exact)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:left]:
        counts[i] += 1
    return counts


def optimal_shares(links: Sequence[Link]) -> list[float]:
    """Rate-proportional shares; every link then finishes at the same instant."""
    _require_links(links)
    total = math.fsum(link.rate_kbps for link in links)
    return [link.rate_kbps / total for link in links]


def optimal_split(links: Sequence[Link], file: FileSpec, scheme_tag: str = DS2D_OPTIMAL) -> SplitPlan:
    shares = optimal_shares(links)
    counts = largest_remainder(shares, file.packet_count)
    return SplitPlan(tuple(zip(links, counts)), scheme_tag, file.bits_per_packet)


def random_shares(n_links: int, rng: np.random.Generator) -> np.ndarray:
    """One Uniform(0,1) split for two links, a uniform simplex point otherwise."""
    if n_links == 1:
        return np.ones(1)
    if n_links == 2:
        a = rng.random()
        return np.array([a, 1.0 - a])
    return rng.dirichlet(np.ones(n_links))


def random_split(links: Sequence[Link], file: FileSpec, rng_seed: int) -> SplitPlan:
    """Random packet split, deterministic given ``rng_seed``."""
    _require_links(links)
    rng = np.random.default_rng(rng_seed)
    shares = random_shares(len(links), rng)
    counts = largest_remainder(shares.tolist(), file.packet_count)
    return SplitPlan(tuple(zip(links, counts)), DS2D_RANDOM, file.bits_per_packet)


def single_link_plan(link: Link, file: FileSpec) -> SplitPlan:
    return SplitPlan(((link, file.packet_count),), D2D_SINGLE, file.bits_per_packet)


def multihoming_links(source: Device, sink: Device, rate_table: RateTable) -> list[Link]:
    common = [n for n in source.interfaces if n in sink.interfaces and n in source.rate_levels]
    if not common:
        raise DomainError(f"source {source.id!r} shares no data interface with sink {sink.id!r}")
    return [Link(source.id, n, rate_for_level(rate_table, source.rate_levels[n])) for n in common]


def multihoming_plan(source: Device, sink: Device, rate_table: RateTable, file: FileSpec) -> SplitPlan:
    """One source spreading the file over all the interfaces it shares with the sink."""
    return optimal_split(multihoming_links(source, sink, rate_table), file, MULTIHOMING)


def link_time(packets: int, bits_per_packet: int, link: Link) -> float:
    return packets * bits_per_packet / link.rate_bps


def ftl(plan: SplitPlan) -> TransferOutcome:
    times = tuple((link, link_time(p, plan.bits_per_packet, link)) for link, p in plan.allocations)
    return TransferOutcome(times, max(t for _, t in times))


def ftl_many(packets: np.ndarray, rates_kbps: np.ndarray, bits_per_packet: int) -> np.ndarray:
    """Vectorised FTL for a batch of plans.

    ``packets`` has shape (m, N); ``rates_kbps`` has shape (N,) or (m, N).
    """
    packets = np.asarray(packets, dtype=float)
    rates = np.asarray(rates_kbps, dtype=float) * 1000.0
    return (packets * bits_per_packet / rates).max(axis=-1)


def ideal_ftl(rates_kbps: Sequence[float], file: FileSpec) -> float:
    """Continuous-split optimum ``P*B / sum(R)``, a lower bound for every plan."""
    return file.total_bits / (math.fsum(rates_kbps) * 1000.0)


def relative_gain(t_scheme: float, t_baseline: float) -> float:
    """Fractional FTL reduction against a baseline; negative means a loss."""
    if not t_baseline > 0:
        raise DomainError(f"baseline latency must be > 0, got {t_baseline!r}")
    return (t_baseline - t_scheme) / t_baseline


def expected_random_ftl_two_links(r1_kbps: float, r2_kbps: float, file: FileSpec) -> float:
    """Exact mean FTL when the first link's share is Uniform(0,1).

    Below the crossover share ``a = R1/(R1+R2)`` the second link is the
    bottleneck, above it the first one is.
    """
    if not (r1_kbps > 0 and r2_kbps > 0):
        raise DomainError("rates must be > 0")
    f = file.total_bits
    r1, r2 = r1_kbps * 1000.0, r2_kbps * 1000.0
    a = r1 / (r1 + r2)
    return (f / r2) * (a - a * a / 2) + (f / r1) * (1 - a * a) / 2
