"""Ds2D file transfer: packet splits, latency, selection and green analytics."""

__version__ = "0.1.0"

from .model import (
    DEFAULT_RATE_TABLE, BatteryProfile, Device, DomainError, Economics, FileSpec, Link,
    RateTable, Scenario, ScenarioError, default_scenario, rate_for_level, validate_scenario,
)
from .split import (
    SplitPlan, TransferOutcome, expected_random_ftl_two_links, ftl, multihoming_plan,
    optimal_split, random_split, relative_gain, single_link_plan,
)
from .selection import Assignment, enumerate_assignments, greedy_select, select_sources
from .green import GreenReport, green_report
from .simkit import (
    SessionEvent, SessionState, advance_session, run_monte_carlo, simulate_packet_transfer,
    sweep_rate_levels,
)
