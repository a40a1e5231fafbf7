"""Scenario configuration and end-to-end orchestration.

A scenario JSON bundles the terrain, forts, task specifications, and
team configurations.  ``run_pipeline`` walks the whole chain: compile
tasks to a global DFA, decompose into parallel subtasks, validate team
capabilities, build products, grid, motion and planning MDPs, search the
most trustworthy path per team, and simulate the execution.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from . import automata
from .automata import Dfa, combine
from .decompose import decompose
from .mdp import (
    CapabilityMdp,
    build_motion_mdp,
    compose_planning_mdp,
    product_task,
    validate_capability_mdp,
)
from .planner import Plan, UnsatisfiableError, optm_path, waypoints
from .render import heatmap_svg, trajectory_svg
from .simulate import run_sim
from .speclang import compile_spec, parse_ltl, parse_re
from .terrain import discretize, load_heightmap
from .trust import TrustBelief, TrustParams


class ScenarioError(ValueError):
    pass


@dataclass
class TeamConfig:
    id: str
    start_cell: tuple
    capability: dict
    trust: TrustParams


@dataclass
class Scenario:
    terrain: dict
    forts: dict  # name -> (row, col)
    tasks: list  # {id, kind, text}
    combinator: str
    teams: list  # TeamConfig, sorted by id
    seed: int
    base_dir: str = "."

    @classmethod
    def from_file(cls, path: str) -> "Scenario":
        with open(path) as fh:
            raw = json.load(fh)
        return cls.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str = ".") -> "Scenario":
        try:
            teams = []
            for t in raw["teams"]:
                tr = t["trust"]
                tau0 = TrustBelief(*tr.get("tau0", (0.5, 0.01)))
                teams.append(
                    TeamConfig(
                        id=str(t["id"]),
                        start_cell=tuple(t["start_cell"]),
                        capability=t["capability"],
                        trust=TrustParams(
                            beta_mean=tuple(tr["beta_mean"]),
                            beta_cov=tuple(tuple(row) for row in tr["beta_cov"]),
                            residual_var=float(tr.get("residual_var", 0.0)),
                            tau0=tau0,
                        ),
                    )
                )
            teams.sort(key=lambda t: t.id)
            scenario = cls(
                terrain=dict(raw["terrain"]),
                forts={k: tuple(v) for k, v in raw["forts"].items()},
                tasks=list(raw["tasks"]),
                combinator=raw["combinator"],
                teams=teams,
                seed=int(os.environ.get("OVERWATCH_SEED", raw.get("seed", 0))),
                base_dir=base_dir,
            )
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"bad scenario field: {exc}") from exc
        if len({t.id for t in scenario.teams}) != len(scenario.teams):
            raise ScenarioError("duplicate team ids")
        return scenario


def compile_global_dfa(scenario: Scenario) -> Dfa:
    """Compile each task and fold them with the combinator expression
    (task ids combined by concatenation and union)."""
    dfas = {}
    for task in scenario.tasks:
        tid, kind, text = task["id"], task["kind"], task["text"]
        if kind == "re":
            ast = parse_re(text)
        elif kind == "ltl":
            ast = parse_ltl(text)
        else:
            raise ScenarioError(f"task {tid!r}: unknown kind {kind!r}")
        atoms = sorted(ast.atoms())
        missing = [a for a in atoms if a not in scenario.forts]
        if missing:
            raise ScenarioError(f"task {tid!r} uses atoms with no fort: {missing}")
        dfas[tid] = compile_spec(ast, tuple(atoms))

    expr = parse_re(scenario.combinator)

    def evaluate(node):
        if node.kind == "atom":
            if node.name not in dfas:
                raise ScenarioError(f"combinator references unknown task {node.name!r}")
            return dfas[node.name]
        if node.kind in ("concat", "union"):
            return combine(node.kind, [evaluate(c) for c in node.children])
        raise ScenarioError(f"combinator allows only task ids, concatenation and union")

    return evaluate(expr)


@dataclass
class PipelineResult:
    global_dfa: Dfa
    decomposition: object
    assignments: list  # (team id, subtask Dfa)
    grid: object
    plans: dict  # team id -> Plan
    planning_mdps: dict
    unsatisfiable: dict  # team id -> message
    log: object | None
    report: dict = field(default_factory=dict)


def run_pipeline(scenario: Scenario, speed: float = 1.0, dt: float = 0.1) -> PipelineResult:
    terrain = scenario.terrain
    try:
        pgm_path = os.path.join(scenario.base_dir, terrain["pgm"])
        with open(pgm_path, "rb") as fh:
            heightmap = load_heightmap(fh.read(), float(terrain["resolution"]))
    except OSError as exc:
        raise ScenarioError(f"[terrain] cannot read heightmap: {exc}") from exc
    grid = discretize(
        heightmap,
        int(terrain["cell_size"]),
        int(terrain["sensing_radius"]),
        float(terrain["g_min"]),
    )

    global_dfa = compile_global_dfa(scenario)
    decomposition = decompose(global_dfa)
    subtasks = sorted(decomposition.parts, key=lambda p: min(p.alphabet))
    if len(scenario.teams) < len(subtasks):
        raise ScenarioError(
            f"insufficient teams: {len(subtasks)} subtasks but {len(scenario.teams)} teams"
        )
    assignments = [(team.id, part) for team, part in zip(scenario.teams, subtasks)]

    motion = build_motion_mdp(
        grid,
        {name: rc for name, rc in scenario.forts.items()},
        float(terrain.get("slip", 0.0)),
    )

    plans = {}
    planning_mdps = {}
    unsatisfiable = {}
    team_by_id = {t.id: t for t in scenario.teams}
    for team_id, subtask in assignments:
        team = team_by_id[team_id]
        cap = validate_capability_mdp(team.capability, subtask.alphabet)
        product = product_task(cap, subtask)
        planning = compose_planning_mdp(product, motion, team.start_cell)
        planning_mdps[team_id] = planning
        try:
            plan = optm_path(planning, grid, team.trust, team=team_id)
        except UnsatisfiableError as exc:
            unsatisfiable[team_id] = str(exc)
            continue
        plan.validate(planning)
        plans[team_id] = plan

    log = run_sim(plans, grid, speed, dt) if plans else None
    report = {
        "seed": scenario.seed,
        "subtasks": len(subtasks),
        "assignments": [[tid, list(part.alphabet)] for tid, part in assignments],
        "decomposition_verified": decomposition.verified,
        "unsatisfiable": dict(sorted(unsatisfiable.items())),
    }
    return PipelineResult(
        global_dfa=global_dfa,
        decomposition=decomposition,
        assignments=assignments,
        grid=grid,
        plans=plans,
        planning_mdps=planning_mdps,
        unsatisfiable=unsatisfiable,
        log=log,
        report=report,
    )


def write_outputs(result: PipelineResult, scenario: Scenario, out_dir: str):
    """Write every pipeline artifact below ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)

    def put(name, text, mode="w"):
        with open(os.path.join(out_dir, name), mode) as fh:
            fh.write(text)

    put("global_automaton.json", result.global_dfa.to_json())
    put("global_automaton.dot", result.global_dfa.to_dot())
    for i, part in enumerate(result.decomposition.parts, start=1):
        put(f"subtask_{i}.json", part.to_json())
        put(f"subtask_{i}.dot", part.to_dot(f"subtask_{i}"))
    put("report.json", json.dumps(result.report, indent=2, sort_keys=True))
    put("terrain_stats.csv", result.grid.to_csv())
    put("terrain_traversability.svg", heatmap_svg(result.grid, "g_mean", forts=scenario.forts))
    put("terrain_los.svg", heatmap_svg(result.grid, "los_mean", forts=scenario.forts))
    for team_id in sorted(result.plans):
        plan = result.plans[team_id]
        put(f"plan_{team_id}.json", plan.to_json(result.grid))
        put(f"trust_{team_id}.csv", plan.trust_csv())
        put(f"planning_mdp_{team_id}.json", result.planning_mdps[team_id].to_json())
    paths = {tid: [cell for (_s, _x, cell) in p.path] for tid, p in result.plans.items()}
    put("paths.svg", heatmap_svg(result.grid, "g_mean", paths=paths, forts=scenario.forts))
    if result.log is not None:
        put("sim_log.csv", result.log.to_csv())
        put("trajectories.svg", trajectory_svg(result.grid, result.log))


def load_plan(path: str) -> Plan:
    with open(path) as fh:
        payload = json.load(fh)
    beliefs = [TrustBelief(p["trust_mean"], p["trust_var"]) for p in payload["path"]]
    return Plan(
        team=payload["team"],
        path=[(p["s"], p["x"], (p["row"], p["col"])) for p in payload["path"]],
        actions=[tuple(a) for a in payload["actions"]],
        beliefs=beliefs,
        terminal_trust=TrustBelief(
            payload["terminal_trust"]["mean"], payload["terminal_trust"]["var"]
        ),
    )
