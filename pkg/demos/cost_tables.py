"""Per-agent action costs for the built-in assembly cell.

Prints the PICK/PLACE and MOVE totals as two small grids, then the
breakdown behind one feasible row and the cooperative guidance cost.
"""

import math

from collabplan.cost import build_cost_table
from collabplan.model import ActionKind
from collabplan.scenario import builtin_benchmark


def fmt(v):
    return "inf" if math.isinf(v) else f"{v:.3f}"


def grid(table, kind, columns, agents):
    print(f"{kind.value:<10}" + "".join(f"{c:>12}" for c in columns))
    for a in agents:
        print(f"{a:<10}" + "".join(f"{fmt(table.total(a, kind, c)):>12}" for c in columns))
    print()


def main():
    cfg = builtin_benchmark()
    table = build_cost_table(cfg)
    agents = [a.id for a in cfg.agents]

    grid(table, ActionKind.PICK, [loc.id for loc in cfg.locations], agents)
    grid(table, ActionKind.MOVE, [p.id for p in cfg.paths], agents)

    # robot2 cannot place on the workspace until a person has shown it where
    before = table.total("robot2", ActionKind.PLACE, "workspace", phase="before")
    after = table.total("robot2", ActionKind.PLACE, "workspace", phase="after")
    print(f"robot2 PLACE workspace: {fmt(before)} before guidance, {fmt(after)} after")

    row = table.find("robot1", ActionKind.PICK, "workspace")[0]
    names = ("F_S", "F_I", "F_R", "R_R", "C_I", "C_S")
    parts = ", ".join(f"{n}={fmt(c)}" for n, c in zip(names, row.breakdown.components()))
    print(f"robot1 PICK workspace: {parts} -> total {fmt(row.total)}")

    coop = next(r for r in table if r.kind is ActionKind.COOPERATE)
    print(f"{coop.agent} COOPERATE at {coop.param}: {fmt(coop.total)}")


if __name__ == "__main__":
    main()
