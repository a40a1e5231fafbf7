"""Command-line entry point.

Subcommands::

    overwatch spec compile --re "p1 p1* (p2 + p3)" [--dot]
    overwatch spec decompose automaton.json [--out-dir DIR]
    overwatch terrain stats map.pgm --cell-size N --sensing-radius M ...
    overwatch plan --scenario s.json --out-dir DIR
    overwatch simulate --scenario s.json --plans DIR [--out CSV]
    overwatch render --scenario s.json --plans DIR --out SVG

Exit codes: 0 success, 2 validation error, 3 unsatisfiable plan,
4 I/O error.  ``OVERWATCH_SEED`` overrides the scenario seed.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from .automata import Dfa
from .decompose import decompose
from .pipeline import Scenario, ScenarioError, load_plan, run_pipeline, write_outputs
from .render import heatmap_svg, trajectory_svg
from .simulate import run_sim
from .speclang import compile_spec, parse_ltl, parse_re
from .terrain import discretize, load_heightmap

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_UNSAT = 3
EXIT_IO = 4


def _build_parser():
    parser = argparse.ArgumentParser(prog="overwatch")
    sub = parser.add_subparsers(dest="command", required=True)

    spec = sub.add_parser("spec", help="compile and decompose task specifications")
    spec_sub = spec.add_subparsers(dest="spec_command", required=True)
    comp = spec_sub.add_parser("compile")
    group = comp.add_mutually_exclusive_group(required=True)
    group.add_argument("--re", dest="re_text")
    group.add_argument("--ltl", dest="ltl_text")
    comp.add_argument("--alphabet", help="comma-separated letters; defaults to the atoms used")
    comp.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of JSON")
    dec = spec_sub.add_parser("decompose")
    dec.add_argument("automaton", help="automaton JSON file")
    dec.add_argument("--out-dir", help="write part JSON/DOT files here")

    terr = sub.add_parser("terrain", help="terrain statistics")
    terr_sub = terr.add_subparsers(dest="terrain_command", required=True)
    stats = terr_sub.add_parser("stats")
    stats.add_argument("pgm")
    stats.add_argument("--cell-size", type=int, required=True)
    stats.add_argument("--sensing-radius", type=int, required=True)
    stats.add_argument("--resolution", type=float, default=1.0)
    stats.add_argument("--g-min", type=float, default=0.4)
    stats.add_argument("--csv", help="write the per-cell CSV here (default: stdout)")
    stats.add_argument("--svg-traversability")
    stats.add_argument("--svg-los")

    plan = sub.add_parser("plan", help="run the full planning pipeline")
    plan.add_argument("--scenario", required=True)
    plan.add_argument("--out-dir", required=True)

    sim = sub.add_parser("simulate", help="execute plans kinematically")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--plans", required=True, help="directory holding plan_*.json")
    sim.add_argument("--speed", type=float, default=1.0)
    sim.add_argument("--dt", type=float, default=0.1)
    sim.add_argument("--out", help="write the CSV log here (default: stdout)")

    render = sub.add_parser("render", help="draw plans over the terrain")
    render.add_argument("--scenario", required=True)
    render.add_argument("--plans", required=True)
    render.add_argument("--out", required=True)
    return parser


def _load_grid(scenario: Scenario):
    terrain = scenario.terrain
    with open(os.path.join(scenario.base_dir, terrain["pgm"]), "rb") as fh:
        heightmap = load_heightmap(fh.read(), float(terrain["resolution"]))
    return discretize(
        heightmap,
        int(terrain["cell_size"]),
        int(terrain["sensing_radius"]),
        float(terrain["g_min"]),
    )


def _load_plans(plans_dir: str):
    plans = {}
    for path in sorted(glob.glob(os.path.join(plans_dir, "plan_*.json"))):
        plan = load_plan(path)
        plans[plan.team] = plan
    if not plans:
        raise FileNotFoundError(f"no plan_*.json files in {plans_dir}")
    return plans


def _run(args) -> int:
    if args.command == "spec" and args.spec_command == "compile":
        if args.re_text is not None:
            ast = parse_re(args.re_text)
        else:
            ast = parse_ltl(args.ltl_text)
        alphabet = (
            tuple(args.alphabet.split(",")) if args.alphabet else tuple(sorted(ast.atoms()))
        )
        dfa = compile_spec(ast, alphabet)
        sys.stdout.write(dfa.to_dot() if args.dot else dfa.to_json() + "\n")
        return EXIT_OK

    if args.command == "spec" and args.spec_command == "decompose":
        with open(args.automaton) as fh:
            dfa = Dfa.from_json(fh.read())
        result = decompose(dfa)
        report = {
            "parts": len(result.parts),
            "partition": [list(block) for block in result.partition],
            "verified": result.verified,
        }
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            for i, part in enumerate(result.parts, start=1):
                for ext, text in (("json", part.to_json()), ("dot", part.to_dot(f"part_{i}"))):
                    with open(os.path.join(args.out_dir, f"part_{i}.{ext}"), "w") as fh:
                        fh.write(text)
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    if args.command == "terrain":
        with open(args.pgm, "rb") as fh:
            heightmap = load_heightmap(fh.read(), args.resolution)
        grid = discretize(heightmap, args.cell_size, args.sensing_radius, args.g_min)
        csv = grid.to_csv()
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(csv)
        else:
            sys.stdout.write(csv)
        if args.svg_traversability:
            with open(args.svg_traversability, "w") as fh:
                fh.write(heatmap_svg(grid, "g_mean"))
        if args.svg_los:
            with open(args.svg_los, "w") as fh:
                fh.write(heatmap_svg(grid, "los_mean"))
        return EXIT_OK

    if args.command == "plan":
        scenario = Scenario.from_file(args.scenario)
        result = run_pipeline(scenario)
        write_outputs(result, scenario, args.out_dir)
        for team_id, message in sorted(result.unsatisfiable.items()):
            sys.stderr.write(f"[plan] team {team_id}: {message}\n")
        return EXIT_UNSAT if result.unsatisfiable else EXIT_OK

    if args.command == "simulate":
        scenario = Scenario.from_file(args.scenario)
        grid = _load_grid(scenario)
        plans = _load_plans(args.plans)
        log = run_sim(plans, grid, args.speed, args.dt)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(log.to_csv())
        else:
            sys.stdout.write(log.to_csv())
        return EXIT_OK

    if args.command == "render":
        scenario = Scenario.from_file(args.scenario)
        grid = _load_grid(scenario)
        plans = _load_plans(args.plans)
        paths = {tid: [cell for (_s, _x, cell) in p.path] for tid, p in plans.items()}
        with open(args.out, "w") as fh:
            fh.write(heatmap_svg(grid, "g_mean", paths=paths, forts=scenario.forts))
        return EXIT_OK

    raise AssertionError("unreachable")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except (OSError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
