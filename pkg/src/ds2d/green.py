"""Energy, electricity cost, carbon and battery-life figures for one source device."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import BatteryProfile, DomainError, Scenario
from .split import TransferOutcome

# Derating applied to the ideal capacity/current ratio.
BATTERY_DERATING = 0.70
# Battery life when the device draws no current.
UNBOUNDED = math.inf


@dataclass(frozen=True)
class GreenReport:
    energy_wh: float
    annual_kwh: float
    annual_cost_usd: float
    annual_co2_lb: float
    load_current_ma: float
    battery_life_h: float
    completes_on_full_charge: bool


def transfer_energy(battery: BatteryProfile, t: float, active_interfaces: int = 1) -> float:
    """Watt-hours spent by a source busy for ``t`` seconds on ``active_interfaces`` radios.

    One active interface for one hour drains ``energy_wh``.
    """
    if t < 0:
        raise DomainError(f"transfer time must be >= 0, got {t!r}")
    if active_interfaces < 1:
        raise DomainError("at least one active interface is required")
    return active_interfaces * battery.energy_wh * t / 3600.0


def annual_energy(energy_wh: float, transfers_per_year: int) -> float:
    return energy_wh * transfers_per_year / 1000.0


def annual_cost(energy_wh: float, transfers_per_year: int, price_cents_per_kwh: float) -> float:
    """Dollars per year for ``transfers_per_year`` transfers of ``energy_wh`` each."""
    if energy_wh < 0 or transfers_per_year < 0 or price_cents_per_kwh < 0:
        raise DomainError("energy, transfer count and price must be >= 0")
    return annual_energy(energy_wh, transfers_per_year) * price_cents_per_kwh / 100.0


def annual_carbon(annual_kwh: float, lb_per_kwh: float) -> float:
    if annual_kwh < 0 or lb_per_kwh < 0:
        raise DomainError("energy and carbon factor must be >= 0")
    return annual_kwh * lb_per_kwh


def load_current(battery: BatteryProfile, energy_wh: float) -> float:
    """Average current (mA) of a device repeating the transfer ``duty_per_hour`` times an hour."""
    if energy_wh < 0:
        raise DomainError("energy must be >= 0")
    return battery.duty_per_hour * energy_wh / battery.nominal_voltage * 1000.0


def battery_life(battery: BatteryProfile, load_ma: float) -> float:
    """Hours until a full charge is drained at ``load_ma``; UNBOUNDED at zero load."""
    if load_ma < 0:
        raise DomainError("load current must be >= 0")
    if load_ma == 0:
        return UNBOUNDED
    return battery.charge_mah / load_ma * BATTERY_DERATING


def green_report(scenario: Scenario, outcome: TransferOutcome, active_interfaces: int = 1) -> GreenReport:
    t = outcome.ftl
    battery, econ = scenario.battery, scenario.economics
    e = transfer_energy(battery, t, active_interfaces)
    kwh = annual_energy(e, econ.transfers_per_year)
    current = load_current(battery, e)
    life = battery_life(battery, current)
    return GreenReport(
        energy_wh=e,
        annual_kwh=kwh,
        annual_cost_usd=annual_cost(e, econ.transfers_per_year, econ.price_cents_per_kwh),
        annual_co2_lb=annual_carbon(kwh, econ.carbon_lb_per_kwh),
        load_current_ma=current,
        battery_life_h=life,
        completes_on_full_charge=life >= t / 3600.0,
    )
