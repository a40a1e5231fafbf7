"""Kinematic execution of plans by two-robot teams.

Each team runs the successive scheme: the bounder drives a straight
segment to the next plan waypoint while the overwatcher holds, then the
overwatcher replays the same segment so both occupy the step's
destination before the next step begins.  Teams advance concurrently on
a shared clock; everything is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class TeamState:
    team: str
    bounder: tuple  # (x, y) meters
    overwatcher: tuple
    path_index: int  # plan step the bounder is moving toward
    phase: str  # bounder-advancing | overwatcher-joining | done


@dataclass
class SimRecord:
    t: float
    team: str
    robot: str  # bounder | overwatcher
    x: float
    y: float
    path_index: int
    trust_mean: float
    trust_var: float


@dataclass
class SimLog:
    records: list = field(default_factory=list)
    status: dict = field(default_factory=dict)  # team -> done | idle

    def to_csv(self) -> str:
        lines = ["t,team,robot,x,y,path_index,trust_mean,trust_var"]
        for r in self.records:
            lines.append(
                f"{r.t:.6f},{r.team},{r.robot},{r.x:.9f},{r.y:.9f},"
                f"{r.path_index},{r.trust_mean:.12g},{r.trust_var:.12g}"
            )
        return "\n".join(lines) + "\n"


def _advance(pos, target, dist):
    dx, dy = target[0] - pos[0], target[1] - pos[1]
    gap = math.hypot(dx, dy)
    if gap <= dist or gap == 0.0:
        return target, True
    f = dist / gap
    return (pos[0] + f * dx, pos[1] + f * dy), False


def run_sim(plans: dict, grid, speed: float, dt: float) -> SimLog:
    """Execute one plan per team; returns the time-stamped log.

    Trust columns carry the plan's per-step belief and step forward when
    the overwatcher completes the step."""
    if speed <= 0 or dt <= 0:
        raise ValueError("speed and dt must be positive")

    teams = {}
    centroids = {}
    for team in sorted(plans):
        plan = plans[team]
        pts = [grid.centroid(cell) for (_s, _x, cell) in plan.path]
        centroids[team] = pts
        phase = "done" if len(pts) == 1 else "bounder-advancing"
        teams[team] = TeamState(team, pts[0], pts[0], 1 if phase != "done" else 0, phase)

    log = SimLog(status={team: "running" for team in teams})

    def record(t, team, state):
        plan = plans[team]
        # trust shown is the last step the overwatcher has completed
        done_idx = state.path_index - 1 if state.phase != "done" else len(plan.path) - 1
        b = plan.beliefs[done_idx]
        for robot, pos in (("bounder", state.bounder), ("overwatcher", state.overwatcher)):
            log.records.append(
                SimRecord(t, team, robot, pos[0], pos[1], done_idx, b.mean, b.var)
            )

    for team, state in teams.items():
        record(0.0, team, state)

    t = 0.0
    while any(s.phase != "done" for s in teams.values()):
        t += dt
        for team in sorted(teams):
            state = teams[team]
            if state.phase == "done":
                continue
            pts = centroids[team]
            target = pts[state.path_index]
            if state.phase == "bounder-advancing":
                state.bounder, arrived = _advance(state.bounder, target, speed * dt)
                if arrived:
                    state.phase = "overwatcher-joining"
            else:
                state.overwatcher, arrived = _advance(state.overwatcher, target, speed * dt)
                if arrived:
                    if state.path_index + 1 < len(pts):
                        state.path_index += 1
                        state.phase = "bounder-advancing"
                    else:
                        state.phase = "done"
            record(t, team, state)

    for team in teams:
        log.status[team] = "done"
    return log
