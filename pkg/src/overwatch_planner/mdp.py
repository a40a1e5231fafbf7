"""The four MDP layers: team capability, task product, grid motion, and
the composed planning MDP.

Conventions
-----------
* Every transition row sums to 1 within ROW_TOL; mass that a product
  rule would drop is redirected to the team's failure state instead so
  rows stay stochastic.
* Capability-state labels are single propositions; the empty string
  labels the idle/roaming state.
* Motion is 8-connected plus ``stay``; a slipped move lands uniformly on
  the other feasible neighbor cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .automata import Dfa

ROW_TOL = 1e-9

MOVE_DELTAS = {
    "N": (-1, 0),
    "NE": (-1, 1),
    "E": (0, 1),
    "SE": (1, 1),
    "S": (1, 0),
    "SW": (1, -1),
    "W": (0, -1),
    "NW": (-1, -1),
}
MOTION_ACTIONS = tuple(sorted(MOVE_DELTAS)) + ("stay",)
IDLE = ""


class MdpError(ValueError):
    pass


def _check_rows(transitions, what):
    for key, dist in transitions.items():
        total = sum(dist.values())
        if abs(total - 1.0) > ROW_TOL:
            raise MdpError(f"{what} row {key} sums to {total!r}, expected 1")
        if any(p <= 0 for p in dist.values()):
            raise MdpError(f"{what} row {key} has a non-positive probability")


@dataclass
class CapabilityMdp:
    """Abstract task-performing model of one robot team."""

    states: list
    actions: list
    transitions: dict  # (state, action) -> {state: prob}
    initial: str
    propositions: list
    labels: dict  # state -> proposition or IDLE
    weights: dict  # (state, action) -> positive weight
    failure_state: str

    def validate(self):
        states = set(self.states)
        if self.initial not in states:
            raise MdpError(f"initial state {self.initial!r} unknown")
        if self.failure_state not in states:
            raise MdpError(f"failure state {self.failure_state!r} unknown")
        for s in self.states:
            if s not in self.labels:
                raise MdpError(f"state {s!r} has no label")
            lab = self.labels[s]
            if lab != IDLE and lab not in self.propositions:
                raise MdpError(f"label {lab!r} of state {s!r} not in the proposition set")
        for (s, a), dist in self.transitions.items():
            if s not in states or a not in self.actions:
                raise MdpError(f"unknown state/action in row ({s!r}, {a!r})")
            if set(dist) - states:
                raise MdpError(f"unknown destination in row ({s!r}, {a!r})")
        _check_rows(self.transitions, "capability")
        for key, w in self.weights.items():
            if w <= 0:
                raise MdpError(f"weight {key} must be positive")

    def actions_at(self, s):
        return sorted(a for (st, a) in self.transitions if st == s)


def validate_capability_mdp(raw: dict, subtask_alphabet=()) -> CapabilityMdp:
    """Build a CapabilityMdp from a parsed scenario dict and check it,
    including the prerequisite that every letter of the assigned subtask
    appears among the team's propositions."""
    try:
        transitions = {
            (row["state"], row["action"]): {k: float(v) for k, v in row["dist"].items()}
            for row in raw["transitions"]
        }
        mdp = CapabilityMdp(
            states=list(raw["states"]),
            actions=list(raw["actions"]),
            transitions=transitions,
            initial=raw["initial"],
            propositions=list(raw["propositions"]),
            labels=dict(raw["labels"]),
            weights={
                (row["state"], row["action"]): float(row.get("weight", 1.0))
                for row in raw["transitions"]
            },
            failure_state=raw["failure_state"],
        )
    except KeyError as exc:
        raise MdpError(f"missing capability field {exc}") from exc
    mdp.validate()
    missing = [l for l in subtask_alphabet if l not in mdp.propositions]
    if missing:
        raise MdpError(f"team propositions do not cover subtask letters {missing}")
    return mdp


@dataclass
class ProductMdp:
    """Capability MDP synchronized with a subtask DFA.

    States are (team state, automaton state) pairs; mass of transitions
    the automaton cannot follow is redirected to (failure, x)."""

    states: list  # (s, x) pairs, discovery order
    actions: list
    transitions: dict  # ((s, x), a) -> {(s', x'): prob}
    initial: tuple
    accepting: set  # (s, x) pairs
    labels: dict  # (s, x) -> proposition or IDLE
    weights: dict
    failure_state: str
    accepting_dfa_states: frozenset

    def validate(self):
        _check_rows(self.transitions, "product")

    def to_json(self) -> str:
        payload = {
            "states": [list(sx) for sx in self.states],
            "actions": list(self.actions),
            "initial": list(self.initial),
            "accepting": sorted([list(sx) for sx in self.accepting]),
            "transitions": sorted(
                [list(sx), a, list(dst), prob]
                for ((sx, a), dist) in self.transitions.items()
                for dst, prob in dist.items()
            ),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_dot(self, name="product") -> str:
        idx = {sx: i for i, sx in enumerate(self.states)}
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for sx, i in idx.items():
            shape = "doublecircle" if sx in self.accepting else "circle"
            lines.append(f'  {i} [shape={shape}, label="{sx[0]},{sx[1]}"];')
        for (sx, a), dist in sorted(self.transitions.items(), key=lambda kv: (idx[kv[0][0]], kv[0][1])):
            for dst, prob in sorted(dist.items(), key=lambda kv: idx.get(kv[0], 0)):
                lines.append(f'  {idx[sx]} -> {idx[dst]} [label="{a}:{prob:g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def product_task(te: CapabilityMdp, g: Dfa) -> ProductMdp:
    """Synchronize a capability MDP with a subtask DFA.

    A destination labeled with a proposition follows the automaton edge
    for that proposition; an idle destination stutters the automaton
    state; mass with no automaton edge goes to (failure, x).  Only
    states reachable from the initial pair are kept."""
    te.validate()
    missing = [l for l in g.alphabet if l not in te.propositions]
    if missing:
        raise MdpError(f"team propositions do not cover subtask letters {missing}")

    def dfa_step(x, label):
        if label == IDLE:
            return x
        return g.transitions.get((x, label))

    lab0 = te.labels[te.initial]
    x1 = g.initial
    if lab0 != IDLE:
        stepped = g.transitions.get((g.initial, lab0))
        if stepped is not None:
            x1 = stepped
    initial = (te.initial, x1)

    states = [initial]
    seen = {initial}
    transitions = {}
    queue = [initial]
    while queue:
        s, x = queue.pop(0)
        for a in te.actions_at(s):
            dist = te.transitions[(s, a)]
            out = {}
            for s2, p in sorted(dist.items()):
                x2 = dfa_step(x, te.labels[s2])
                dst = (s2, x2) if x2 is not None else (te.failure_state, x)
                out[dst] = out.get(dst, 0.0) + p
            transitions[((s, x), a)] = out
            for dst in out:
                if dst not in seen:
                    seen.add(dst)
                    states.append(dst)
                    queue.append(dst)

    product = ProductMdp(
        states=states,
        actions=list(te.actions),
        transitions=transitions,
        initial=initial,
        accepting={(s, x) for (s, x) in states if x in g.accepting},
        labels={(s, x): te.labels[s] for (s, x) in states},
        weights={
            ((s, x), a): te.weights.get((s, a), 1.0)
            for (s, x) in states
            for a in te.actions_at(s)
        },
        failure_state=te.failure_state,
        accepting_dfa_states=frozenset(g.accepting),
    )
    product.validate()
    return product


@dataclass
class MotionMdp:
    """Grid motion over traversable cells."""

    cells: list  # (row, col)
    actions: tuple
    transitions: dict  # ((row, col), action) -> {(row, col): prob}
    fort_at: dict  # (row, col) -> fort proposition
    rewards: dict  # ((row, col), action) -> positive placeholder

    def validate(self):
        _check_rows(self.transitions, "motion")
        cells = set(self.cells)
        for ((c, a), dist) in self.transitions.items():
            for dst in dist:
                dr = abs(dst[0] - c[0])
                dc = abs(dst[1] - c[1])
                if dr > 1 or dc > 1:
                    raise MdpError(f"non-adjacent motion {c} -> {dst}")
                if dst not in cells:
                    raise MdpError(f"motion into no-go cell {dst}")

    def actions_at(self, c):
        return sorted(a for (cc, a) in self.transitions if cc == c)

    def to_json(self) -> str:
        payload = {
            "cells": sorted(list(c) for c in self.cells),
            "actions": list(self.actions),
            "forts": {f"{r},{c}": fort for (r, c), fort in sorted(self.fort_at.items())},
            "transitions": sorted(
                [list(c), a, list(dst), prob]
                for ((c, a), dist) in self.transitions.items()
                for dst, prob in dist.items()
            ),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def build_motion_mdp(grid, forts: dict, slip: float) -> MotionMdp:
    """Motion MDP over the grid's traversable cells.

    ``forts`` maps fort propositions to (row, col) cells.  An intended
    move succeeds with probability 1 - slip; the slip mass is shared
    equally by the other feasible neighbor cells."""
    if not 0.0 <= slip <= 0.2:
        raise MdpError("slip must be in [0, 0.2]")
    cells = grid.traversable_cells()
    cell_set = set(cells)
    fort_at = {}
    for fort, rc in forts.items():
        rc = tuple(rc)
        if rc not in cell_set:
            raise MdpError(f"fort {fort!r} on a no-go cell {rc}")
        fort_at[rc] = fort

    transitions = {}
    rewards = {}
    for c in cells:
        feasible = {}
        for a in sorted(MOVE_DELTAS):
            dr, dc = MOVE_DELTAS[a]
            dst = (c[0] + dr, c[1] + dc)
            if dst in cell_set:
                feasible[a] = dst
        for a, dst in feasible.items():
            others = [d for d in feasible.values() if d != dst]
            if slip > 0 and others:
                dist = {dst: 1.0 - slip}
                for d in others:
                    dist[d] = dist.get(d, 0.0) + slip / len(others)
            else:
                dist = {dst: 1.0}
            transitions[(c, a)] = dist
            rewards[(c, a)] = 1.0
        transitions[(c, "stay")] = {c: 1.0}
        rewards[(c, "stay")] = 1.0

    mdp = MotionMdp(cells, MOTION_ACTIONS, transitions, fort_at, rewards)
    mdp.validate()
    return mdp


@dataclass
class PlanningMdp:
    """Joint task-and-motion model: states are (team state, automaton
    state, cell) triples, actions are (task action, move) pairs."""

    states: list  # (s, x, cell) in discovery order
    index: dict  # state -> position in ``states``
    transitions: dict  # (state_idx, (a, move)) -> {state_idx: prob}
    initial: int
    accepting: set  # state indices
    labels: dict  # state_idx -> proposition or IDLE
    cell_of: dict  # state_idx -> (row, col)

    def validate(self):
        _check_rows(self.transitions, "planning")

    def successors(self, idx):
        """Deterministically ordered positive-probability successors."""
        out = set()
        for (src, _a), dist in self.transitions.items():
            if src == idx:
                out |= set(dist)
        return sorted(out)

    def adjacency(self):
        adj = {i: set() for i in range(len(self.states))}
        for (src, _a), dist in self.transitions.items():
            adj[src] |= set(dist)
        return {i: sorted(v) for i, v in adj.items()}

    def action_between(self, src, dst):
        """Lexicographically smallest action carrying src -> dst."""
        best = None
        for (s, a), dist in self.transitions.items():
            if s == src and dst in dist and (best is None or a < best):
                best = a
        return best

    def to_json(self) -> str:
        payload = {
            "states": [[s, x, list(c)] for (s, x, c) in self.states],
            "initial": self.initial,
            "accepting": sorted(self.accepting),
            "transitions": sorted(
                [src, list(action), dst, prob]
                for ((src, action), dist) in self.transitions.items()
                for dst, prob in dist.items()
            ),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def compose_planning_mdp(product: ProductMdp, motion: MotionMdp, start_cell) -> PlanningMdp:
    """Compose the task product with the motion MDP.

    Synchronization: arriving at a fort cell fires the product
    transition whose destination explores that fort; arriving anywhere
    else stutters the task layer; mass that cannot be synchronized goes
    to the failure task state at the actual motion outcome.  Composed
    probabilities are products of the two layer probabilities, so rows
    stay stochastic."""
    start_cell = tuple(start_cell)
    if start_cell not in set(motion.cells):
        raise MdpError(f"start cell {start_cell} is not traversable")

    te_label = {}
    for (s, x) in product.states:
        te_label[s] = product.labels[(s, x)]
    failure = product.failure_state

    initial = product.initial + (start_cell,)
    states = [initial]
    index = {initial: 0}
    transitions = {}
    queue = [0]
    while queue:
        idx = queue.pop(0)
        s, x, c = states[idx]
        task_rows = sorted(
            (a, dist) for ((sx, a), dist) in product.transitions.items() if sx == (s, x)
        )
        motion_rows = sorted(
            (a, dist) for ((cc, a), dist) in motion.transitions.items() if cc == c
        )
        for a, task_dist in task_rows:
            for move, move_dist in motion_rows:
                out = {}
                for c2, pc in sorted(move_dist.items()):
                    fort = motion.fort_at.get(c2)
                    for (s2, x2), pt in sorted(task_dist.items()):
                        if s2 == failure:
                            dst = (s2, x2, c2)
                        elif fort is not None:
                            if te_label.get(s2) == fort:
                                dst = (s2, x2, c2)
                            else:
                                dst = (failure, x, c2)
                        else:
                            dst = (s, x, c2)
                        out[dst] = out.get(dst, 0.0) + pt * pc
                key = (idx, (a, move))
                row = {}
                for dst, prob in out.items():
                    if dst not in index:
                        index[dst] = len(states)
                        states.append(dst)
                        queue.append(index[dst])
                    row[index[dst]] = prob
                transitions[key] = row

    accepting_x = product.accepting_dfa_states
    planning = PlanningMdp(
        states=states,
        index=index,
        transitions=transitions,
        initial=0,
        # failure-task states are excluded so a plan's task layer always
        # spells a word of the subtask language
        accepting={
            i for i, (s, x, c) in enumerate(states) if x in accepting_x and s != failure
        },
        labels={i: te_label.get(s, IDLE) for i, (s, x, c) in enumerate(states)},
        cell_of={i: c for i, (s, x, c) in enumerate(states)},
    )
    planning.validate()
    return planning
