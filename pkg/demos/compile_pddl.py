"""Turn a YAML scenario into PDDL, read it back, and ground it again.

The emitted problem carries every finite action cost as a numeric fluent,
so grounding the parsed text reproduces the compiled task exactly.
"""

import sys
from pathlib import Path

from collabplan.pddl import emit_domain, emit_problem, ground, parse_domain, parse_problem
from collabplan.scenario import builtin_benchmark, compile_scenario, load_scenario


def main(argv):
    cfg = load_scenario(Path(argv[0])) if argv else builtin_benchmark(1)
    cp = compile_scenario(cfg)
    domain_text, problem_text = emit_domain(cp.domain), emit_problem(cp.problem)
    print(domain_text)
    print(problem_text)

    domain = parse_domain(domain_text)
    problem = parse_problem(problem_text, domain)
    regrounded = ground(domain, problem)
    print(f"; round trip equal: domain={domain == cp.domain} problem={problem == cp.problem}")
    print(f"; regrounded task equal: {regrounded == cp.grounded} "
          f"({len(regrounded.actions)} actions, {regrounded.n_props} facts)")


if __name__ == "__main__":
    main(sys.argv[1:])
