import numpy as np
import pytest

from conftest import grid_from_scores
from overwatch_planner.planner import Plan
from overwatch_planner.simulate import run_sim
from overwatch_planner.trust import TrustBelief


def make_plan(team, cells, means=None):
    means = means or [0.5 + 0.1 * k for k in range(len(cells))]
    beliefs = [TrustBelief(m, 0.01) for m in means]
    return Plan(
        team=team,
        path=[("idle", 0, cell) for cell in cells],
        actions=[("roam", "E")] * (len(cells) - 1),
        beliefs=beliefs,
        terminal_trust=beliefs[-1],
    )


@pytest.fixture
def strip_grid():
    # cell size 2 at 1 m/px: centroids 2 m apart
    return grid_from_scores(np.full((1, 3), 0.8), np.full((1, 3), 0.5))


def by_time(log, team="blue", robot="bounder"):
    return {r.t: r for r in log.records if r.team == team and r.robot == robot}


class TestRunSim:
    def test_initial_records_at_origin(self, strip_grid):
        log = run_sim({"blue": make_plan("blue", [(0, 0), (0, 1)])}, strip_grid, 1.0, 0.25)
        first = [r for r in log.records if r.t == 0.0]
        assert {r.robot for r in first} == {"bounder", "overwatcher"}
        assert all((r.x, r.y) == (1.0, 1.0) for r in first)

    def test_bounder_then_overwatcher_timing(self, strip_grid):
        log = run_sim({"blue": make_plan("blue", [(0, 0), (0, 1)])}, strip_grid, 1.0, 0.25)
        bounder = by_time(log)
        over = by_time(log, robot="overwatcher")
        # 2 m at 1 m/s: bounder arrives at t=2, overwatcher replays by t=4
        assert (bounder[2.0].x, bounder[2.0].y) == (3.0, 1.0)
        assert over[2.0].x == pytest.approx(1.0)
        assert (over[4.0].x, over[4.0].y) == (3.0, 1.0)
        assert max(bounder) == pytest.approx(4.0)

    def test_overwatch_invariant(self, strip_grid):
        # while the bounder moves, the overwatcher holds a completed waypoint
        log = run_sim(
            {"blue": make_plan("blue", [(0, 0), (0, 1), (0, 2)])}, strip_grid, 1.0, 0.25
        )
        over = by_time(log, robot="overwatcher")
        for t, r in over.items():
            assert (r.x, r.y) in {(1.0, 1.0), (3.0, 1.0), (5.0, 1.0)} or t > 0

    def test_trust_steps_on_overwatcher_arrival(self, strip_grid):
        log = run_sim(
            {"blue": make_plan("blue", [(0, 0), (0, 1)], means=[0.5, 0.9])},
            strip_grid,
            1.0,
            0.25,
        )
        bounder = by_time(log)
        assert bounder[3.75].trust_mean == pytest.approx(0.5)
        assert bounder[4.0].trust_mean == pytest.approx(0.9)
        assert bounder[4.0].path_index == 1

    def test_full_two_segment_mission(self, strip_grid):
        log = run_sim(
            {"blue": make_plan("blue", [(0, 0), (0, 1), (0, 2)])}, strip_grid, 1.0, 0.25
        )
        last = max(r.t for r in log.records)
        assert last == pytest.approx(8.0)
        finals = [r for r in log.records if r.t == last]
        assert all((r.x, r.y) == (5.0, 1.0) for r in finals)
        assert log.status == {"blue": "done"}

    def test_single_state_plan_is_immediately_done(self, strip_grid):
        log = run_sim({"blue": make_plan("blue", [(0, 1)])}, strip_grid, 1.0, 0.25)
        assert {r.t for r in log.records} == {0.0}

    def test_teams_recorded_in_sorted_order(self, strip_grid):
        plans = {
            "red": make_plan("red", [(0, 0), (0, 1)]),
            "blue": make_plan("blue", [(0, 2), (0, 1)]),
        }
        log = run_sim(plans, strip_grid, 1.0, 0.5)
        per_tick = {}
        for r in log.records:
            per_tick.setdefault(r.t, []).append(r.team)
        for teams in per_tick.values():
            assert teams == sorted(teams)

    def test_csv_format(self, strip_grid):
        log = run_sim({"blue": make_plan("blue", [(0, 0), (0, 1)])}, strip_grid, 1.0, 0.25)
        lines = log.to_csv().strip().split("\n")
        assert lines[0] == "t,team,robot,x,y,path_index,trust_mean,trust_var"
        assert len(lines) == 1 + len(log.records)
        assert lines[1].startswith("0.000000,blue,bounder,")

    def test_parameter_validation(self, strip_grid):
        plan = make_plan("blue", [(0, 0), (0, 1)])
        with pytest.raises(ValueError):
            run_sim({"blue": plan}, strip_grid, 0.0, 0.1)
        with pytest.raises(ValueError):
            run_sim({"blue": plan}, strip_grid, 1.0, -0.1)

    def test_deterministic(self, strip_grid):
        plans = {"blue": make_plan("blue", [(0, 0), (0, 1), (0, 2)])}
        a = run_sim(plans, strip_grid, 1.3, 0.07)
        b = run_sim(plans, strip_grid, 1.3, 0.07)
        assert a.to_csv() == b.to_csv()
