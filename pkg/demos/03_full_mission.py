"""End-to-end mission: compile, decompose, plan, simulate, render.

Run from the repository root:

    python3 demos/03_full_mission.py

Equivalent to `overwatch plan --scenario scenarios/bounding_demo.json
--out-dir demos/output/mission`, then prints a short tour of the
results.
"""

import os

from overwatch_planner.pipeline import Scenario, run_pipeline, write_outputs

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "output", "mission")

scenario = Scenario.from_file(os.path.join(HERE, "..", "scenarios", "bounding_demo.json"))
result = run_pipeline(scenario)
write_outputs(result, scenario, OUT)

print("global automaton:", result.global_dfa.n_states, "states")
print("subtasks:", len(result.decomposition.parts))
for team, part in result.assignments:
    print(f"  team {team} <- alphabet {part.alphabet}")

for team, plan in sorted(result.plans.items()):
    cells = [cell for (_s, _x, cell) in plan.path]
    print(
        f"team {team}: {len(cells)} steps, terminal trust "
        f"{plan.terminal_trust.mean:.4f} +- {plan.terminal_trust.var ** 0.5:.4f}"
    )
    print("  route:", " -> ".join(str(c) for c in cells[:6]), "...")

for team, message in sorted(result.unsatisfiable.items()):
    print(f"team {team}: unsatisfiable ({message})")

if result.log is not None:
    last = max(r.t for r in result.log.records)
    print(f"simulation finished at t={last:.1f}s ({len(result.log.records)} records)")
print("artifacts in", os.path.relpath(OUT))
