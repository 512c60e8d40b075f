"""Domain types for Ds2D transfer scenarios.

Everything here is an immutable value object. Validation collects every
violated invariant instead of stopping at the first one, so a broken
scenario file can be fixed in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

# Achievable data rate (kbps) for SINR levels 1..15.
DEFAULT_RATES_KBPS = (
    213.3, 328.2, 527.8, 842.2, 1227.8,
    1646.1, 2067.2, 2679.7, 3368.8, 3822.7,
    4651.2, 5463.2, 6332.8, 7161.3, 7776.6,
)
NUM_LEVELS = 15

SINK = "sink"
CANDIDATE_SOURCE = "candidate_source"


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ScenarioError(ValueError):
    """A scenario violates one or more invariants.

    ``errors`` holds one ``"field.path: message"`` string per violation.
    """

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class RateTable:
    rates_kbps: tuple[float, ...] = DEFAULT_RATES_KBPS

    def problems(self, path: str = "rate_table") -> list[str]:
        errs = []
        rates = self.rates_kbps
        if len(rates) != NUM_LEVELS:
            errs.append(f"{path}: expected {NUM_LEVELS} levels, got {len(rates)}")
        if any(not r > 0 for r in rates):
            errs.append(f"{path}: all rates must be > 0")
        if any(b <= a for a, b in zip(rates, rates[1:])):
            errs.append(f"{path}: rates must be strictly increasing with level")
        return errs

    @property
    def levels(self) -> list[tuple[int, float]]:
        return list(enumerate(self.rates_kbps, start=1))


DEFAULT_RATE_TABLE = RateTable()


def rate_for_level(table: RateTable, level: int) -> float:
    """Return the rate in kbps for a SINR level in 1..15."""
    n = len(table.rates_kbps)
    if isinstance(level, bool) or not isinstance(level, int) or not 1 <= level <= n:
        raise DomainError(f"rate level must be an integer in 1..{n}, got {level!r}")
    return table.rates_kbps[level - 1]


@dataclass(frozen=True)
class FileSpec:
    packet_count: int = 55_000
    bits_per_packet: int = 1500 * 8

    @property
    def total_bits(self) -> int:
        return self.packet_count * self.bits_per_packet

    def problems(self, path: str = "file") -> list[str]:
        errs = []
        if self.packet_count < 1:
            errs.append(f"{path}.packet_count: must be >= 1")
        if self.bits_per_packet < 8:
            errs.append(f"{path}.bits_per_packet: must be >= 8")
        return errs


@dataclass(frozen=True)
class BatteryProfile:
    charge_mah: float = 1440.0
    energy_wh: float = 5.45
    duty_per_hour: float = 2.0  # file transfers per hour, drives the load-current model

    @property
    def nominal_voltage(self) -> float:
        return self.energy_wh / (self.charge_mah / 1000.0)

    def problems(self, path: str = "battery") -> list[str]:
        errs = []
        for name in ("charge_mah", "energy_wh", "duty_per_hour"):
            if not getattr(self, name) > 0:
                errs.append(f"{path}.{name}: must be > 0")
        return errs


@dataclass(frozen=True)
class Device:
    """A sink or candidate source.

    ``interfaces`` keeps declaration order (and any duplicates, so validation
    can report them). ``rate_levels`` maps interface index to SINR level; the
    sink does not need levels.
    """

    id: str
    role: str
    interfaces: tuple[int, ...]
    rate_levels: Mapping[int, int] = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "interfaces", tuple(self.interfaces))
        object.__setattr__(self, "rate_levels", MappingProxyType(dict(self.rate_levels)))

    def problems(self, path: str) -> list[str]:
        errs = []
        if self.role not in (SINK, CANDIDATE_SOURCE):
            errs.append(f"{path}.role: unknown role {self.role!r}")
        if not self.interfaces:
            errs.append(f"{path}.interfaces: must be non-empty")
        if len(set(self.interfaces)) != len(self.interfaces):
            errs.append(f"{path}.interfaces: duplicate interface index in {list(self.interfaces)}")
        for n in self.interfaces:
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                errs.append(f"{path}.interfaces: interface index {n!r} must be a positive integer")
        if self.role == CANDIDATE_SOURCE:
            for n in dict.fromkeys(self.interfaces):
                lvl = self.rate_levels.get(n)
                if lvl is None:
                    errs.append(f"{path}.rate_levels[{n}]: missing rate level")
                elif isinstance(lvl, bool) or not isinstance(lvl, int) or not 1 <= lvl <= NUM_LEVELS:
                    errs.append(f"{path}.rate_levels[{n}]: level {lvl!r} outside 1..{NUM_LEVELS}")
            extra = set(self.rate_levels) - set(self.interfaces)
            if extra:
                errs.append(f"{path}.rate_levels: levels given for undeclared interfaces {sorted(extra)}")
        return errs


@dataclass(frozen=True)
class Economics:
    price_cents_per_kwh: float = 12.0
    carbon_lb_per_kwh: float = 1.21
    transfers_per_year: int = 365
    random_seed: int = 0


@dataclass(frozen=True)
class Link:
    source_id: str
    interface: int
    rate_kbps: float

    @property
    def rate_bps(self) -> float:
        return self.rate_kbps * 1000.0


@dataclass(frozen=True)
class Scenario:
    sink: Device
    sources: tuple[Device, ...]
    file: FileSpec = FileSpec()
    battery: BatteryProfile = BatteryProfile()
    rate_table: RateTable = DEFAULT_RATE_TABLE
    economics: Economics = Economics()
    scenario_id: str = "scenario"
    # (source_id, interface) whose level a sweep varies; None means the
    # first interface of the first source.
    varied: tuple[str, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))

    def source(self, source_id: str) -> Device:
        for d in self.sources:
            if d.id == source_id:
                return d
        raise DomainError(f"unknown source {source_id!r}")

    def link(self, source_id: str, interface: int) -> Link:
        dev = self.source(source_id)
        if interface not in dev.rate_levels:
            raise DomainError(f"source {source_id!r} has no interface {interface}")
        rate = rate_for_level(self.rate_table, dev.rate_levels[interface])
        return Link(source_id, interface, rate)

    @property
    def varied_link(self) -> tuple[str, int]:
        if self.varied is not None:
            return self.varied
        first = self.sources[0]
        return first.id, first.interfaces[0]

    def with_level(self, source_id: str, interface: int, level: int) -> "Scenario":
        """Copy of the scenario with one (source, interface) set to ``level``."""
        dev = self.source(source_id)
        if interface not in dev.interfaces:
            raise DomainError(f"source {source_id!r} has no interface {interface}")
        rate_for_level(self.rate_table, level)
        levels = dict(dev.rate_levels)
        levels[interface] = level
        new_dev = Device(dev.id, dev.role, dev.interfaces, levels)
        sources = tuple(new_dev if d.id == source_id else d for d in self.sources)
        return Scenario(self.sink, sources, self.file, self.battery, self.rate_table,
                        self.economics, self.scenario_id, self.varied)


def scenario_problems(s: Scenario) -> list[str]:
    errs: list[str] = []
    if not s.sources:
        errs.append("sources: sources empty")
    errs += s.sink.problems("sink")
    if s.sink.role != SINK:
        errs.append(f"sink.role: expected {SINK!r}, got {s.sink.role!r}")
    seen_ids = {s.sink.id}
    for i, d in enumerate(s.sources):
        path = f"sources[{i}]"
        errs += d.problems(path)
        if d.role != CANDIDATE_SOURCE:
            errs.append(f"{path}.role: expected {CANDIDATE_SOURCE!r}, got {d.role!r}")
        if d.id in seen_ids:
            errs.append(f"{path}.id: duplicate device id {d.id!r}")
        seen_ids.add(d.id)
    errs += s.file.problems()
    errs += s.battery.problems()
    errs += s.rate_table.problems()
    econ = s.economics
    if econ.transfers_per_year < 1:
        errs.append("economics.transfers_per_year: must be >= 1")
    if econ.price_cents_per_kwh < 0:
        errs.append("economics.price_cents_per_kwh: must be >= 0")
    if econ.carbon_lb_per_kwh < 0:
        errs.append("economics.carbon_lb_per_kwh: must be >= 0")
    if s.varied is not None and s.sources:
        sid, n = s.varied
        match = [d for d in s.sources if d.id == sid]
        if not match:
            errs.append(f"varied: unknown source {sid!r}")
        elif n not in match[0].interfaces:
            errs.append(f"varied: source {sid!r} has no interface {n}")
    return errs


def validate_scenario(s: Scenario) -> Scenario:
    """Return ``s`` unchanged if valid, else raise ScenarioError listing every violation."""
    errs = scenario_problems(s)
    if errs:
        raise ScenarioError(errs)
    return s


def default_scenario(level: int = 1) -> Scenario:
    """Two sources feeding a two-interface sink.

    D1 is the varied device: interface 1 at ``level`` and interface 2 at
    level 6, so it can also act as a multi-homing source. D2 sits on
    interface 2 at level 6 (1646.1 kbps).
    """
    sink = Device("D0", SINK, (1, 2))
    d1 = Device("D1", CANDIDATE_SOURCE, (1, 2), {1: level, 2: 6})
    d2 = Device("D2", CANDIDATE_SOURCE, (2,), {2: 6})
    return validate_scenario(
        Scenario(sink, (d1, d2), scenario_id="ds2d-default", varied=("D1", 1))
    )
