"""Timed plan text format: ``<start>: (<name> <args>...) [<duration>]`` per line."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:
    from .grounding import GroundedTask

_LINE_RE = re.compile(
    r"^\s*(?P<start>\d+(?:\.\d+)?)\s*:\s*\(\s*(?P<body>[^()\[\]]+?)\s*\)\s*"
    r"\[\s*(?P<dur>\d+(?:\.\d+)?)\s*\]\s*$"
)
_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*\Z")


class PlanFormatError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class TimedStep:
    start: float
    name: str
    args: tuple[str, ...]
    duration: float
    cost: float = 0.0

    @property
    def key(self) -> tuple[str, ...]:
        return (self.name, *self.args)

    @property
    def label(self) -> str:
        return "(" + " ".join(self.key) + ")"

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class TimedPlan:
    steps: tuple[TimedStep, ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.steps, key=lambda s: s.start))
        object.__setattr__(self, "steps", ordered)

    @property
    def makespan(self) -> float:
        return max((s.end for s in self.steps), default=0.0)

    @property
    def total_cost(self) -> float:
        return math.fsum(s.cost for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def parse_plan(text: str, task: GroundedTask | None = None) -> TimedPlan:
    """Read a plan listing. With ``task`` given, step costs are filled in from it
    (an action the task does not know is an error)."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0]
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise PlanFormatError(f"malformed plan line: {raw.strip()!r}", lineno)
        tokens = m.group("body").split()
        if not all(_TOKEN_RE.match(t) for t in tokens):
            raise PlanFormatError(f"bad action token in {raw.strip()!r}", lineno)
        tokens = [t.lower() for t in tokens]
        cost = 0.0
        if task is not None:
            op = task.find_op(tuple(tokens))
            if op is None:
                raise PlanFormatError(f"unknown action ({' '.join(tokens)})", lineno)
            cost = op.cost
        steps.append(TimedStep(float(m.group("start")), tokens[0], tuple(tokens[1:]),
                               float(m.group("dur")), cost))
    return TimedPlan(tuple(steps))


def emit_plan(plan: TimedPlan | Iterable[TimedStep]) -> str:
    steps = plan.steps if isinstance(plan, TimedPlan) else TimedPlan(tuple(plan)).steps
    return "".join(f"{s.start:.3f}: {s.label} [{s.duration:.3f}]\n" for s in steps)
