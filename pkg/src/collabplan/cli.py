"""Command-line entry point: ``collabplan <subcommand> ...``.

Exit codes: 0 success, 1 no plan or invalid plan, 2 bad usage or input.
Payloads go to stdout; progress and summaries go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .capability import CapabilityError, PlanarTwoLinkArm, build_capability_map, export_map
from .model import Box, Point3, Region
from .pddl import ParseError, PlanFormatError, emit_domain, emit_plan, emit_problem, parse_plan
from .planner import BudgetExhausted, Violation, lift_and_schedule, plan_cost, plan_search, validate_plan
from .planner.search import DEFAULT_BUDGET
from .scenario import ScenarioConfig, ScenarioError, builtin_benchmark, compile_scenario, load_scenario

BUILTIN = "builtin"


class UsageError(Exception):
    pass


def _scenario(ref: str) -> ScenarioConfig:
    """A file path, or ``builtin`` / ``builtin:1`` / ``builtin:2`` for the assembly cell."""
    if ref == BUILTIN or ref.startswith(BUILTIN + ":"):
        cycles = ref.partition(":")[2] or "2"
        if cycles not in ("1", "2"):
            raise UsageError(f"unknown built-in scenario {ref!r}")
        return builtin_benchmark(int(cycles))
    return load_scenario(Path(ref))


def _write(text: str | bytes, out: str | None) -> None:
    if out is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
            sys.stdout.flush()
        else:
            sys.stdout.write(text)
        return
    mode = "wb" if isinstance(text, bytes) else "w"
    with open(out, mode, **({} if mode == "wb" else {"encoding": "utf-8"})) as f:
        f.write(text)


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_cost_table(args) -> int:
    table = compile_scenario(_scenario(args.scenario)).cost_table
    _write(table.to_csv() if args.format == "csv" else table.to_json() + "\n", None)
    return 0


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected {n} comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"{what}: expected {n} comma-separated numbers")
    return vals


def cmd_capability_map(args) -> int:
    x0, x1, y0, y1, z0, z1 = _floats(args.bounds, 6, "--bounds")
    base = Point3(*_floats(args.base, 3, "--base"))
    try:
        region = Region.from_boxes([Box(Point3(x0, y0, z0), Point3(x1, y1, z1))])
        arm = PlanarTwoLinkArm(base, args.link1, args.link2)
    except ValueError as e:
        raise UsageError(str(e)) from None
    cmap = build_capability_map(arm, region, args.cell, args.samples, args.seed, robot_id=args.robot)
    _write(export_map(cmap, args.format), args.out)
    _info(f"{cmap.dims[0]}x{cmap.dims[1]}x{cmap.dims[2]} cells, {args.samples} samples each")
    return 0


def cmd_compile(args) -> int:
    cp = compile_scenario(_scenario(args.scenario))
    domain, problem = emit_domain(cp.domain), emit_problem(cp.problem)
    if args.out_domain is None and args.out_problem is None:
        _write(domain + "\n" + problem, None)
    else:
        if args.out_domain:
            _write(domain, args.out_domain)
        if args.out_problem:
            _write(problem, args.out_problem)
    _info(f"{cp.grounded.n_props} propositions, {len(cp.grounded.actions)} ground actions")
    return 0


def _solve(cfg: ScenarioConfig, budget: int):
    cp = compile_scenario(cfg)
    try:
        plan = plan_search(cp.grounded, budget=budget)
    except BudgetExhausted as e:
        _info(f"no plan: {e}")
        return cp, None
    if plan is None:
        _info("no plan: the goal is unreachable")
        return cp, None
    return cp, plan


def _report(cp, plan, out: str | None) -> int:
    _, sched, timed = lift_and_schedule(plan, cp.grounded)
    violation = validate_plan(cp.grounded, timed)
    _write(emit_plan(timed), out)
    _info(f"steps: {len(plan)}  total cost: {plan_cost(plan):.4f}  makespan: {sched.makespan:g} s")
    if violation is not None:  # pragma: no cover - planner output always validates
        _info(f"internal error: planner output fails validation: {violation.to_json()}")
        return 1
    return 0


def cmd_plan(args) -> int:
    cp, plan = _solve(_scenario(args.scenario), args.budget)
    if plan is None:
        return 1
    return _report(cp, plan, args.out)


def cmd_validate(args) -> int:
    cp = compile_scenario(_scenario(args.scenario))
    try:
        text = Path(args.plan).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError(f"cannot read plan {args.plan}: {e}") from None
    try:
        timed = parse_plan(text, cp.grounded)
    except PlanFormatError as e:
        if "unknown action" in str(e):
            _write(Violation(e.line - 1, "unknown-action", str(e)).to_json() + "\n", None)
            return 1
        raise
    violation = validate_plan(cp.grounded, timed)
    if violation is None:
        _write("ok\n", None)
        _info(f"total cost: {timed.total_cost:.4f}  makespan: {timed.makespan:g} s")
        return 0
    _write(violation.to_json() + "\n", None)
    return 1


def cmd_demo(args) -> int:
    cfg = builtin_benchmark(args.cycles)
    cp, plan = _solve(cfg, args.budget)
    if plan is None:  # pragma: no cover - the benchmark is solvable
        return 1
    return _report(cp, plan, None)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collabplan", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    scen_help = "scenario YAML file, or 'builtin' / 'builtin:1' / 'builtin:2'"

    s = sub.add_parser("cost-table", help="per-agent action cost table")
    s.add_argument("scenario", help=scen_help)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_cost_table)

    s = sub.add_parser("capability-map", help="reachability index grid for a planar two-link arm")
    s.add_argument("--oracle", choices=("planar2",), default="planar2")
    s.add_argument("--bounds", required=True, help="xmin,xmax,ymin,ymax,zmin,zmax in metres")
    s.add_argument("--cell", type=float, required=True, help="cell edge length in metres")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--base", default="0,0,0", help="arm base x,y,z")
    s.add_argument("--link1", type=float, default=0.4)
    s.add_argument("--link2", type=float, default=0.3)
    s.add_argument("--robot", default="robot")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_capability_map)

    s = sub.add_parser("compile", help="emit the cost-annotated PDDL domain and problem")
    s.add_argument("scenario", help=scen_help)
    s.add_argument("--out-domain")
    s.add_argument("--out-problem")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("plan", help="find a cost-optimal plan and schedule it")
    s.add_argument("scenario", help=scen_help)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="node expansion limit")
    s.add_argument("--out", help="write the plan here instead of stdout")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("validate", help="check a timed plan against a scenario")
    s.add_argument("scenario", help=scen_help)
    s.add_argument("plan")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("demo", help="plan the built-in assembly cell")
    s.add_argument("--cycles", type=int, choices=(1, 2), default=2)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_demo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        parser.error("--samples must be at least 1")
    if getattr(args, "budget", 1) < 0:
        parser.error("--budget must be non-negative")
    try:
        return args.func(args)
    except (UsageError, ScenarioError, ParseError, PlanFormatError, CapabilityError) as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
