"""Trust-maximizing path search over a planning MDP.

``optm_path`` is a label-setting search: each state's label is the
negated expected trust propagated from its predecessor's belief, states
are finalized in best-label order, and the best finalized accepting
state is traced back through predecessor pointers.  With a zero
self-weight the propagated trust depends only on the successor's own
cell, so the search is exact; with a positive self-weight it is a
heuristic whose gap is measured against ``oracle_path``, the exhaustive
simple-path enumeration.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

from .mdp import PlanningMdp
from .trust import TrustBelief, TrustParams, propagate_trust


class UnsatisfiableError(ValueError):
    """No accepting planning state is reachable in this terrain."""


@dataclass
class Plan:
    team: str
    path: list  # (s, x, cell) triples
    actions: list  # composed (task action, move) pairs, one per step
    beliefs: list  # TrustBelief per path state
    terminal_trust: TrustBelief

    def validate(self, ppm: PlanningMdp):
        if len(self.beliefs) != len(self.path):
            raise ValueError("one belief per path state required")
        idxs = [ppm.index[state] for state in self.path]
        if idxs[-1] not in ppm.accepting:
            raise ValueError("plan does not end in an accepting state")
        for u, v, action in zip(idxs, idxs[1:], self.actions):
            dist = ppm.transitions.get((u, action), {})
            if dist.get(v, 0.0) <= 0.0:
                raise ValueError(f"plan uses impossible transition {u} -> {v} via {action}")

    def to_json(self, grid=None) -> str:
        payload = {
            "team": self.team,
            "path": [
                {
                    "s": s,
                    "x": x,
                    "row": cell[0],
                    "col": cell[1],
                    "trust_mean": b.mean,
                    "trust_var": b.var,
                }
                for (s, x, cell), b in zip(self.path, self.beliefs)
            ],
            "terminal_trust": {
                "mean": self.terminal_trust.mean,
                "var": self.terminal_trust.var,
            },
            "actions": [list(a) for a in self.actions],
        }
        if grid is not None:
            payload["waypoints"] = [list(p) for p in waypoints(self, grid)]
        return json.dumps(payload, indent=2, sort_keys=True)

    def trust_csv(self) -> str:
        lines = ["step,mean,var"]
        for k, b in enumerate(self.beliefs):
            lines.append(f"{k},{b.mean:.12g},{b.var:.12g}")
        return "\n".join(lines) + "\n"


def _propagate(belief, grid, cell, params):
    nxt = propagate_trust(belief, grid.stats_at(cell), params)
    if nxt.mean <= 0.0:
        raise ValueError(
            "expected trust dropped to a non-positive value; the search "
            "requires strictly positive expected trust at every state"
        )
    return nxt


def optm_path(ppm: PlanningMdp, grid, params: TrustParams, team: str = "team") -> Plan:
    """Most trustworthy accepting path by label-setting search.

    Ties between equal labels break on the smaller state index, so the
    result is deterministic."""
    n = len(ppm.states)
    adjacency = ppm.adjacency()
    value = [float("inf")] * n
    belief: list = [None] * n
    predecessor = [None] * n
    finalized = [False] * n

    belief[ppm.initial] = _propagate(params.tau0, grid, ppm.cell_of[ppm.initial], params)
    value[ppm.initial] = -belief[ppm.initial].mean
    heap = [(value[ppm.initial], ppm.initial)]
    while heap:
        v, u = heapq.heappop(heap)
        if finalized[u] or v > value[u]:
            continue
        finalized[u] = True
        for w in adjacency[u]:
            if finalized[w]:
                continue
            b = _propagate(belief[u], grid, ppm.cell_of[w], params)
            if -b.mean < value[w]:
                value[w] = -b.mean
                belief[w] = b
                predecessor[w] = u
                heapq.heappush(heap, (value[w], w))

    goal = None
    for i in sorted(ppm.accepting):
        if finalized[i] and (goal is None or value[i] < value[goal]):
            goal = i
    if goal is None:
        raise UnsatisfiableError("no reachable accepting state: unsatisfiable in this terrain")

    idxs = [goal]
    while idxs[-1] != ppm.initial:
        idxs.append(predecessor[idxs[-1]])
    idxs.reverse()
    return _finish(ppm, grid, params, team, idxs)


def _finish(ppm, grid, params, team, idxs):
    beliefs = []
    b = params.tau0
    for i in idxs:
        b = _propagate(b, grid, ppm.cell_of[i], params)
        beliefs.append(b)
    actions = [ppm.action_between(u, v) for u, v in zip(idxs, idxs[1:])]
    return Plan(
        team=team,
        path=[ppm.states[i] for i in idxs],
        actions=actions,
        beliefs=beliefs,
        terminal_trust=beliefs[-1],
    )


def oracle_path(ppm: PlanningMdp, grid, params: TrustParams, max_len=None, team: str = "team") -> Plan:
    """Exhaustive search over simple paths for the maximum terminal
    expected trust; the reference oracle for ``optm_path``.

    Ties break on the lexicographically smallest state-index sequence."""
    if max_len is None:
        max_len = len(ppm.states)
    adjacency = ppm.adjacency()
    start_belief = _propagate(params.tau0, grid, ppm.cell_of[ppm.initial], params)

    best = None  # (-terminal_mean, idx tuple)
    stack = [(ppm.initial, (ppm.initial,), start_belief)]
    while stack:
        u, path, b = stack.pop()
        if u in ppm.accepting:
            key = (-b.mean, path)
            if best is None or key < best:
                best = key
        if len(path) >= max_len:
            continue
        for w in reversed(adjacency[u]):
            if w in path:
                continue
            stack.append((w, path + (w,), _propagate(b, grid, ppm.cell_of[w], params)))

    if best is None:
        raise UnsatisfiableError("no reachable accepting state: unsatisfiable in this terrain")
    return _finish(ppm, grid, params, team, list(best[1]))


def waypoints(plan: Plan, grid):
    """World-frame cell centroids along the plan, consecutive
    duplicates collapsed."""
    points = []
    for (_s, _x, cell) in plan.path:
        p = grid.centroid(cell)
        if not points or points[-1] != p:
            points.append(p)
    return points
