import pytest

from ds2d.model import (
    CANDIDATE_SOURCE, DEFAULT_RATE_TABLE, SINK, BatteryProfile, Device, DomainError, Economics,
    FileSpec, RateTable, Scenario, ScenarioError, default_scenario, rate_for_level,
    scenario_problems, validate_scenario,
)


def test_rate_lookup_endpoints():
    assert rate_for_level(DEFAULT_RATE_TABLE, 1) == 213.3
    assert rate_for_level(DEFAULT_RATE_TABLE, 6) == 1646.1
    assert rate_for_level(DEFAULT_RATE_TABLE, 15) == 7776.6


@pytest.mark.parametrize("level", [0, 16, -1, 2.0, True])
def test_rate_lookup_out_of_range(level):
    with pytest.raises(DomainError, match="1..15"):
        rate_for_level(DEFAULT_RATE_TABLE, level)


def test_default_table_invariants():
    rates = [r for _, r in DEFAULT_RATE_TABLE.levels]
    assert [lv for lv, _ in DEFAULT_RATE_TABLE.levels] == list(range(1, 16))
    assert all(a < b for a, b in zip(rates, rates[1:]))
    assert DEFAULT_RATE_TABLE.problems() == []


def test_bad_tables_reported():
    assert RateTable((1.0, 2.0)).problems()
    flat = list(DEFAULT_RATE_TABLE.rates_kbps)
    flat[3] = flat[2]
    assert any("increasing" in e for e in RateTable(tuple(flat)).problems())


def test_default_file_and_battery():
    assert FileSpec().total_bits == 660_000_000
    assert BatteryProfile().nominal_voltage == pytest.approx(5.45 / 1.44, rel=1e-9)
    # no overflow at the upper bounds
    assert FileSpec(10**9, 10**6).total_bits == 10**15


def test_default_scenario_is_valid():
    s = default_scenario()
    assert validate_scenario(s) is s
    assert s.link("D1", 1).rate_kbps == 213.3
    assert s.link("D2", 2).rate_kbps == 1646.1


def test_zero_sources_reported():
    s = Scenario(Device("D0", SINK, (1,)), ())
    with pytest.raises(ScenarioError) as e:
        validate_scenario(s)
    assert any("sources empty" in m for m in e.value.errors)


def test_duplicate_interface_reported():
    bad = Device("D1", CANDIDATE_SOURCE, (1, 1), {1: 3})
    s = Scenario(Device("D0", SINK, (1, 2)), (bad,))
    errs = scenario_problems(s)
    assert any("sources[0].interfaces" in m and "duplicate" in m for m in errs)


def test_all_violations_collected():
    s = Scenario(
        Device("D0", SINK, (1,)),
        (Device("D1", CANDIDATE_SOURCE, (1, 0), {1: 20}),),
        file=FileSpec(0, 4),
        battery=BatteryProfile(0, 5.45, 2),
        economics=Economics(transfers_per_year=0),
    )
    errs = scenario_problems(s)
    paths = {e.split(":")[0] for e in errs}
    assert {"sources[0].rate_levels[1]", "sources[0].rate_levels[0]", "sources[0].interfaces",
            "file.packet_count", "file.bits_per_packet", "battery.charge_mah",
            "economics.transfers_per_year"} <= paths


def test_with_level_leaves_original_untouched():
    s = default_scenario()
    t = s.with_level("D1", 1, 10)
    assert t.link("D1", 1).rate_kbps == 3822.7
    assert s.link("D1", 1).rate_kbps == 213.3
    with pytest.raises(DomainError):
        s.with_level("D1", 1, 16)
