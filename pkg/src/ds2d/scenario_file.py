"""Reading and writing scenario files.

Scenario files are YAML documents whose keys carry their units::

    scenario_id: ds2d-default
    sink: {id: D0, interfaces: [1, 2]}
    sources:
      - id: D1
        links:
          - {interface: 1, rate_level: 1}
          - {interface: 2, rate_level: 6}
    file: {packet_count: 55000, bits_per_packet: 12000}
    battery: {charge_mah: 1440, energy_wh: 5.45, duty_transfers_per_hour: 2}
    economics: {price_cents_per_kwh: 12, carbon_lb_per_kwh: 1.21,
                transfers_per_year: 365, random_seed: 0}
    rate_table_kbps: [213.3, ...]          # optional, 15 entries
    sweep: {varied_source: D1, varied_interface: 1}   # optional
"""

from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

import yaml

from .model import (
    CANDIDATE_SOURCE, DEFAULT_RATE_TABLE, SINK, BatteryProfile, Device, Economics,
    FileSpec, RateTable, Scenario, ScenarioError, validate_scenario,
)

DEFAULT_SCENARIO_NAME = "default_scenario.yaml"


def default_scenario_path() -> Path:
    return Path(str(resources.files("ds2d") / "data" / DEFAULT_SCENARIO_NAME))


class _Reader:
    def __init__(self):
        self.errors: list[str] = []

    def get(self, d, key, path, kind, default=None, required=True):
        if not isinstance(d, dict) or key not in d:
            if required:
                self.errors.append(f"{path}.{key}: missing")
            return default
        v = d[key]
        ok = {
            int: isinstance(v, int) and not isinstance(v, bool),
            float: isinstance(v, (int, float)) and not isinstance(v, bool),
            str: isinstance(v, (str, int)) and not isinstance(v, bool),
            list: isinstance(v, list),
            dict: isinstance(v, dict),
        }[kind]
        if not ok:
            self.errors.append(f"{path}.{key}: expected {kind.__name__}, got {v!r}")
            return default
        return str(v) if kind is str else v


def scenario_from_dict(doc) -> Scenario:
    """Build and validate a Scenario; raises ScenarioError with every problem found."""
    r = _Reader()
    if not isinstance(doc, dict):
        raise ScenarioError(["<root>: expected a mapping"])
    sink_doc = r.get(doc, "sink", "<root>", dict, {})
    sink = Device(
        r.get(sink_doc, "id", "sink", str, "sink"),
        SINK,
        tuple(r.get(sink_doc, "interfaces", "sink", list, [])),
    )
    sources = []
    for i, sd in enumerate(r.get(doc, "sources", "<root>", list, [])):
        path = f"sources[{i}]"
        if not isinstance(sd, dict):
            r.errors.append(f"{path}: expected a mapping")
            continue
        ifaces, levels = [], {}
        for j, ld in enumerate(r.get(sd, "links", path, list, [])):
            n = r.get(ld, "interface", f"{path}.links[{j}]", int)
            lvl = r.get(ld, "rate_level", f"{path}.links[{j}]", int)
            if n is not None:
                ifaces.append(n)
                if lvl is not None:
                    levels[n] = lvl
        sources.append(Device(r.get(sd, "id", path, str, f"S{i}"), CANDIDATE_SOURCE, tuple(ifaces), levels))

    fd = r.get(doc, "file", "<root>", dict, {})
    file = FileSpec(r.get(fd, "packet_count", "file", int, 1), r.get(fd, "bits_per_packet", "file", int, 8))
    bd = r.get(doc, "battery", "<root>", dict, {})
    battery = BatteryProfile(
        float(r.get(bd, "charge_mah", "battery", float, 1.0)),
        float(r.get(bd, "energy_wh", "battery", float, 1.0)),
        float(r.get(bd, "duty_transfers_per_hour", "battery", float, 1.0)),
    )
    ed = r.get(doc, "economics", "<root>", dict, {})
    econ = Economics(
        float(r.get(ed, "price_cents_per_kwh", "economics", float, 0.0)),
        float(r.get(ed, "carbon_lb_per_kwh", "economics", float, 0.0)),
        r.get(ed, "transfers_per_year", "economics", int, 1),
        r.get(ed, "random_seed", "economics", int, 0, required=False),
    )
    table = DEFAULT_RATE_TABLE
    rates = r.get(doc, "rate_table_kbps", "<root>", list, None, required=False)
    if rates is not None:
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in rates):
            table = RateTable(tuple(float(x) for x in rates))
        else:
            r.errors.append("rate_table_kbps: every entry must be a number")
    varied = None
    sw = r.get(doc, "sweep", "<root>", dict, None, required=False)
    if sw is not None:
        sid = r.get(sw, "varied_source", "sweep", str)
        n = r.get(sw, "varied_interface", "sweep", int)
        if sid is not None and n is not None:
            varied = (sid, n)
    scn = Scenario(sink, tuple(sources), file, battery, table, econ,
                   r.get(doc, "scenario_id", "<root>", str, "scenario", required=False), varied)
    if r.errors:
        try:
            validate_scenario(scn)
        except ScenarioError as e:
            raise ScenarioError(r.errors + e.errors) from None
        raise ScenarioError(r.errors)
    return validate_scenario(scn)


def scenario_to_dict(s: Scenario) -> dict:
    doc = {
        "scenario_id": s.scenario_id,
        "sink": {"id": s.sink.id, "interfaces": list(s.sink.interfaces)},
        "sources": [
            {"id": d.id, "links": [{"interface": n, "rate_level": d.rate_levels[n]} for n in d.interfaces]}
            for d in s.sources
        ],
        "file": {"packet_count": s.file.packet_count, "bits_per_packet": s.file.bits_per_packet},
        "battery": {"charge_mah": s.battery.charge_mah, "energy_wh": s.battery.energy_wh,
                    "duty_transfers_per_hour": s.battery.duty_per_hour},
        "economics": {"price_cents_per_kwh": s.economics.price_cents_per_kwh,
                      "carbon_lb_per_kwh": s.economics.carbon_lb_per_kwh,
                      "transfers_per_year": s.economics.transfers_per_year,
                      "random_seed": s.economics.random_seed},
    }
    if s.rate_table != DEFAULT_RATE_TABLE:
        doc["rate_table_kbps"] = list(s.rate_table.rates_kbps)
    if s.varied is not None:
        doc["sweep"] = {"varied_source": s.varied[0], "varied_interface": s.varied[1]}
    return doc


def load_scenario(path) -> tuple[Scenario, str]:
    """Load a scenario file; returns the scenario and a short hash of the file bytes.

    Raises OSError if unreadable and ScenarioError if malformed or invalid.
    """
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()[:16]
    try:
        doc = yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ScenarioError([f"<root>: not valid YAML ({e})"]) from None
    return scenario_from_dict(doc), digest


def dump_scenario(s: Scenario, path) -> None:
    Path(path).write_text(yaml.safe_dump(scenario_to_dict(s), sort_keys=False))
