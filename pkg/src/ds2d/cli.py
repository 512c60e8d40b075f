"""Command-line front end: ``ds2d compare | sweep | select``.

Exit codes: 0 success, 1 usage, 2 invalid or unreadable scenario,
3 infeasible selection.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .model import DomainError, NUM_LEVELS, Scenario, ScenarioError
from .scenario_file import default_scenario_path, load_scenario
from .selection import candidate_pairs, select_sources, within_guard
from .simkit import SCHEMES, SweepResult, sweep_rate_levels

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2, 3
FORMAT_VERSION = 1

CSV_COLUMNS = (
    "scenario_id", "seed", "level", "scheme", "alpha_first_link", "ftl_s", "gain_vs_d2d",
    "energy_wh", "annual_kwh", "annual_cost_usd", "annual_co2_lb", "i_source_ma",
    "battery_life_h", "completes_on_charge",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """12 significant digits; booleans lower-case; infinite battery life as 'inf'."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.12g}"
    return str(x)


def _json_num(x):
    if isinstance(x, float):
        return "inf" if math.isinf(x) else float(f"{x:.12g}")
    return x


def parse_levels(text: str) -> list[int]:
    """Accept ``a..b`` or a comma list; every level must be in 1..15."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            levels = list(range(int(a), int(b) + 1))
        else:
            levels = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse levels {text!r}; use a..b or a comma list") from None
    bad = [lv for lv in levels if not 1 <= lv <= NUM_LEVELS]
    if not levels or bad:
        raise UsageError(f"levels must lie in 1..{NUM_LEVELS}, got {text!r}")
    return levels


def parse_schemes(text: str) -> list[str]:
    schemes = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in schemes if s not in SCHEMES]
    if not schemes or bad:
        raise UsageError(f"unknown scheme(s) {bad or text!r}; choose from {','.join(SCHEMES)}")
    return schemes


def sweep_rows(result: SweepResult, scenario_id: str, seed: int) -> list[dict]:
    out = []
    for r in result.rows:
        g = r.green
        out.append({
            "scenario_id": scenario_id, "seed": seed, "level": r.level, "scheme": r.scheme,
            "alpha_first_link": r.alpha_first_link, "ftl_s": r.ftl_s, "gain_vs_d2d": r.gain_vs_d2d,
            "energy_wh": g.energy_wh, "annual_kwh": g.annual_kwh,
            "annual_cost_usd": g.annual_cost_usd, "annual_co2_lb": g.annual_co2_lb,
            "i_source_ma": g.load_current_ma, "battery_life_h": g.battery_life_h,
            "completes_on_charge": g.completes_on_full_charge,
            "mc_mean_s": r.mc_mean_s, "mc_stderr_s": r.mc_stderr_s,
            "expected_ftl_s": r.expected_ftl_s,
        })
    return out


def render_csv(rows: list[dict], scenario_hash: str) -> str:
    buf = io.StringIO()
    buf.write(f"# ds2d {__version__} format={FORMAT_VERSION} scenario_sha256={scenario_hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def render_structured(rows: list[dict], scenario_hash: str) -> str:
    doc = {
        "tool": "ds2d",
        "tool_version": __version__,
        "format_version": FORMAT_VERSION,
        "scenario_sha256": scenario_hash,
        "rows": [{k: _json_num(v) for k, v in row.items()} for row in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def _load(path: str | None) -> tuple[Scenario, str]:
    return load_scenario(path or default_scenario_path())


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_compare(args) -> int:
    schemes = parse_schemes(args.schemes)
    if args.level is not None and not 1 <= args.level <= NUM_LEVELS:
        raise UsageError(f"--level must lie in 1..{NUM_LEVELS}, got {args.level}")
    scn, _ = _load(args.scenario)
    sid, n = scn.varied_link
    level = args.level if args.level is not None else scn.source(sid).rate_levels[n]
    seed = scn.economics.random_seed if args.seed is None else args.seed
    res = sweep_rate_levels(scn, levels=[level], schemes=schemes, mc_draws=args.mc_draws, seed=seed)
    head = (f"{'scheme':<12}{'alpha':>8}{'ftl_s':>12}{'gain':>9}{'energy_wh':>11}"
            f"{'kwh/yr':>9}{'usd/yr':>9}{'co2_lb':>9}{'i_ma':>10}{'life_h':>9}  completes")
    lines = [f"scenario {scn.scenario_id}: {sid} interface {n} at level {level} "
             f"({scn.rate_table.rates_kbps[level - 1]} kbps)", head]
    for r in res.rows:
        g = r.green
        lines.append(
            f"{r.scheme:<12}{r.alpha_first_link:>8.4f}{r.ftl_s:>12.2f}{r.gain_vs_d2d:>9.3f}"
            f"{g.energy_wh:>11.4f}{g.annual_kwh:>9.4f}{g.annual_cost_usd:>9.4f}{g.annual_co2_lb:>9.4f}"
            f"{g.load_current_ma:>10.1f}{g.battery_life_h:>9.3f}  {fmt(g.completes_on_full_charge)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    levels = parse_levels(args.levels)
    schemes = parse_schemes(args.schemes)
    scn, digest = _load(args.scenario)
    seed = scn.economics.random_seed if args.seed is None else args.seed
    res = sweep_rate_levels(scn, levels=levels, schemes=schemes, mc_draws=args.mc_draws, seed=seed)
    rows = sweep_rows(res, scn.scenario_id, seed)
    text = render_csv(rows, digest) if args.format == "csv" else render_structured(rows, digest)
    _emit(text, args.out)
    return EXIT_OK


def cmd_select(args) -> int:
    scn, _ = _load(args.scenario)
    if not candidate_pairs(scn):
        lines = ["infeasible: no source shares a data interface with the sink",
                 f"  sink {scn.sink.id} interfaces: {sorted(set(scn.sink.interfaces))}"]
        lines += [f"  source {d.id} interfaces: {sorted(set(d.interfaces))}" for d in scn.sources]
        print("\n".join(lines), file=sys.stderr)
        return EXIT_INFEASIBLE
    a = select_sources(scn)
    lines = [f"scenario {scn.scenario_id}: {len(a.pairs)} link(s) selected"]
    lines += [f"  {sid} -> interface {n} ({scn.link(sid, n).rate_kbps} kbps)" for sid, n in a.sorted_pairs]
    lines.append(f"objective (aggregate rate, kbps): {fmt(a.objective_value)}")
    lines.append(f"exact_optimum: {fmt(within_guard(scn))}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ds2d", description="Ds2D packet-split, latency and green analysis.")
    p.add_argument("--version", action="version", version=f"ds2d {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--scenario", help="scenario YAML file (default: bundled two-source set-up)")
        sp.add_argument("--out", help="write output here instead of stdout")

    c = sub.add_parser("compare", help="all schemes at one rate level")
    common(c)
    c.add_argument("--level", type=int, help="level of the varied link (default: from scenario)")
    c.add_argument("--schemes", default=",".join(SCHEMES))
    c.add_argument("--mc-draws", type=int, default=0)
    c.add_argument("--seed", type=int)
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="sweep the varied link over rate levels")
    common(s)
    s.add_argument("--levels", default=f"1..{NUM_LEVELS}")
    s.add_argument("--schemes", default=",".join(SCHEMES))
    s.add_argument("--mc-draws", type=int, default=0)
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=("csv", "structured"), default="csv")
    s.set_defaults(func=cmd_sweep)

    sel = sub.add_parser("select", help="choose sources and interfaces")
    common(sel)
    sel.set_defaults(func=cmd_select)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "mc_draws", 0) < 0:
        print("ds2d: error: --mc-draws must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"ds2d: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"ds2d: cannot read scenario: {e.strerror or e}", file=sys.stderr)
        return EXIT_INVALID
    except ScenarioError as e:
        print(f"ds2d: {e}", file=sys.stderr)
        return EXIT_INVALID
    except DomainError as e:
        print(f"ds2d: error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
