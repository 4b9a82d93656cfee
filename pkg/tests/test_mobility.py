import io

import numpy as np
import pytest

from uwsnsim import mobility, topology as topo
from uwsnsim.errors import ConfigError


def grid10():
    return topo.generate_grid(10, 100.0, 120.0)


class TestSinkTrip:
    def test_table1_schedule(self):
        trajectory = mobility.plan_sink_trip(grid10(), 600.0)
        times = sorted(t for ts in trajectory.visit_schedule.values() for t in ts)
        assert len(times) == 100
        assert len(trajectory.visit_schedule) == 100
        assert all(len(ts) == 1 for ts in trajectory.visit_schedule.values())
        gaps = np.diff(times)
        assert gaps.max() <= 6.0 + 1e-9

    def test_single_node(self):
        net = topo.generate_line(1, 100.0, 150.0)
        trajectory = mobility.plan_sink_trip(net, 600.0)
        assert trajectory.visit_schedule == {0: [0.0]}

    def test_line_visits_in_order(self):
        net = topo.generate_line(50, 100.0, 150.0)
        trajectory = mobility.plan_sink_trip(net, 600.0)
        assert trajectory.order == list(range(50))
        times = [trajectory.visit_schedule[n][0] for n in trajectory.order]
        assert times == sorted(times)

    def test_loaded_line_nearest_neighbor_order(self):
        text = "txrange 150\n" + "".join(f"node {i} {i * 100} 0\n" for i in range(10))
        net = topo.load_topology(io.StringIO(text))
        trajectory = mobility.plan_sink_trip(net, 100.0)
        assert trajectory.order == list(range(10))

    def test_grid_boustrophedon_serpentine(self):
        trajectory = mobility.plan_sink_trip(grid10(), 600.0)
        assert trajectory.order[:10] == list(range(10))
        assert trajectory.order[10:20] == list(range(19, 9, -1))

    def test_rejects_bad_duration(self):
        with pytest.raises(ConfigError):
            mobility.plan_sink_trip(grid10(), 0.0)


def make_manhattan(net, start=44, seed=0):
    state = mobility.make_attacker(net, 0, "manhattan", 10.0, 20.0, start)
    return state, np.random.default_rng(seed)


class TestAdvanceAttacker:
    def test_thirty_seconds_one_node(self):
        net = grid10()
        state, rng = make_manhattan(net)
        state, attacked = mobility.advance_attacker(state, net, 30.0, rng)
        assert len(attacked) == 1

    def test_zero_elapsed_nothing(self):
        net = grid10()
        state, rng = make_manhattan(net)
        state, attacked = mobility.advance_attacker(state, net, 0.0, rng)
        assert attacked == []
        assert state.current == 44

    def test_ninety_seconds_three_nodes(self):
        net = grid10()
        state, rng = make_manhattan(net)
        state, attacked = mobility.advance_attacker(state, net, 90.0, rng)
        assert len(attacked) == 3

    @pytest.mark.parametrize("elapsed", [15.0, 30.0, 75.0, 120.0, 301.0])
    def test_attack_count_is_floor_of_budget(self, elapsed):
        net = grid10()
        state, rng = make_manhattan(net)
        _state, attacked = mobility.advance_attacker(state, net, elapsed, rng)
        assert len(attacked) == int(elapsed // 30.0)

    def test_walk_never_leaves_grid(self):
        net = grid10()
        state, rng = make_manhattan(net, start=0, seed=3)
        for _ in range(500):
            node = mobility.attacker_step(state, net, rng)
            assert node in net.nodes

    def test_same_seed_same_path(self):
        net = grid10()
        a, rng_a = make_manhattan(net, seed=9)
        b, rng_b = make_manhattan(net, seed=9)
        path_a = [mobility.attacker_step(a, net, rng_a) for _ in range(50)]
        path_b = [mobility.attacker_step(b, net, rng_b) for _ in range(50)]
        assert path_a == path_b

    def test_no_immediate_backtrack(self):
        net = grid10()
        state, rng = make_manhattan(net, start=55, seed=4)
        prev = None
        here = 55
        for _ in range(200):
            node = mobility.attacker_step(state, net, rng)
            assert node != prev  # interior nodes always offer another direction
            prev, here = here, node


class TestSweepModels:
    def test_line_sweep_marches_in_order(self):
        net = topo.generate_line(10, 100.0, 150.0)
        state = mobility.make_attacker(net, 0, "line_sweep", 10.0, 20.0, start=0)
        rng = np.random.default_rng(0)
        path = [mobility.attacker_step(state, net, rng) for _ in range(10)]
        assert path == list(range(10))

    def test_line_sweep_bounces_at_end(self):
        net = topo.generate_line(5, 100.0, 150.0)
        state = mobility.make_attacker(net, 0, "line_sweep", 10.0, 20.0, start=0)
        rng = np.random.default_rng(0)
        path = [mobility.attacker_step(state, net, rng) for _ in range(9)]
        assert path == [0, 1, 2, 3, 4, 3, 2, 1, 0]

    def test_line_sweep_reverse_direction(self):
        net = topo.generate_line(5, 100.0, 150.0)
        state = mobility.make_attacker(net, 0, "line_sweep", 10.0, 20.0, start=4, direction=-1)
        rng = np.random.default_rng(0)
        path = [mobility.attacker_step(state, net, rng) for _ in range(5)]
        assert path == [4, 3, 2, 1, 0]

    def test_circular_sweep_covers_all_nodes(self):
        net = topo.generate_lattice(10, 5, 100.0, 120.0)
        state = mobility.make_attacker(net, 0, "circular_sweep", 10.0, 20.0, start=0)
        rng = np.random.default_rng(0)
        seen = {mobility.attacker_step(state, net, rng) for _ in range(50)}
        assert seen == set(net.nodes)

    def test_stationary_stays(self):
        net = grid10()
        state = mobility.make_attacker(net, 0, "stationary", 10.0, 20.0, start=7)
        rng = np.random.default_rng(0)
        assert [mobility.attacker_step(state, net, rng) for _ in range(3)] == [7, 7, 7]

    def test_unknown_model_rejected(self):
        net = grid10()
        with pytest.raises(ConfigError):
            mobility.make_attacker(net, 0, "teleport", 10.0, 20.0, start=0)
