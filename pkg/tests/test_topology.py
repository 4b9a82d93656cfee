import io
import math

import numpy as np
import pytest

from uwsnsim import topology as topo
from uwsnsim.errors import (
    DuplicateNodeIdError,
    EmptyTopologyError,
    IncompleteGraphError,
    MalformedRecordError,
    TopologyError,
)


def line_file_text(n=50, spacing=100.0, tx_range=150.0):
    lines = [f"txrange {tx_range}"]
    lines += [f"node {i} {i * spacing} 0" for i in range(n)]
    return "\n".join(lines) + "\n"


class TestGenerateGrid:
    def test_table1_grid(self):
        net = topo.generate_grid(10, 100.0, 142.0)
        assert len(net) == 100
        interior = 44  # position (400, 400)
        in_range = net.neighbors(interior)
        assert len(in_range) == 8
        orthogonal = [
            b for b in in_range
            if math.dist(net.nodes[interior].position, net.nodes[b].position) == 100.0
        ]
        assert len(orthogonal) == 4

    def test_2x2_with_diagonal_reach(self):
        net = topo.generate_grid(2, 100.0, 150.0)
        assert len(net) == 4
        for nid in net.nodes:
            assert len(net.neighbors(nid)) == 3

    def test_3x3_center_four_neighbors(self):
        net = topo.generate_grid(3, 100.0, 100.0)
        assert net.neighbors(4) == [1, 3, 5, 7]

    def test_rejects_bad_parameters(self):
        with pytest.raises(TopologyError):
            topo.generate_grid(10, -1.0, 100.0)
        with pytest.raises(TopologyError):
            topo.generate_grid(10, 100.0, 0.0)
        with pytest.raises(TopologyError):
            topo.generate_grid(1, 100.0, 100.0)

    def test_deterministic(self):
        a = topo.generate_grid(5, 50.0, 75.0)
        b = topo.generate_grid(5, 50.0, 75.0)
        assert a.positions() == b.positions()
        assert a.links == b.links


class TestLoadTopology:
    def test_line_file_counts(self):
        net = topo.load_topology(io.StringIO(line_file_text()))
        assert len(net) == 50
        assert len(net.in_range_pairs()) == 49

    def test_duplicate_id(self):
        text = "txrange 150\nnode 7 0 0\nnode 7 100 0\n"
        with pytest.raises(DuplicateNodeIdError) as err:
            topo.load_topology(io.StringIO(text))
        assert err.value.node_id == 7

    def test_empty(self):
        with pytest.raises(EmptyTopologyError):
            topo.load_topology(io.StringIO("# nothing here\n"))

    def test_malformed_record(self):
        with pytest.raises(MalformedRecordError):
            topo.load_topology(io.StringIO("node 0 0\n"))
        with pytest.raises(MalformedRecordError):
            topo.load_topology(io.StringIO("frob 1 2 3\n"))

    def test_disconnected_warns(self):
        text = "txrange 50\nnode 0 0 0\nnode 1 1000 0\n"
        with pytest.warns(UserWarning, match="disconnected"):
            net = topo.load_topology(io.StringIO(text))
        assert not net.connected

    def test_explicit_links_override_range(self):
        text = "txrange 500\nnode 0 0 0\nnode 1 100 0\nnode 2 200 0\nlink 0 1 0.5\n"
        with pytest.warns(UserWarning, match="disconnected"):  # node 2 has no link
            net = topo.load_topology(io.StringIO(text))
        assert set(net.links) == {(0, 1), (1, 0)}
        assert net.links[(0, 1)] == 0.5


class TestHelloSimulation:
    def test_lossless_gives_exact_one(self):
        net = topo.generate_grid(3, 100.0, 100.0)
        etx = topo.simulate_hello_rounds(net, seed=1, rounds=10)
        assert set(etx.values()) == {1.0}

    def test_lossy_etx_matches_monte_carlo_oracle(self):
        # two-node topology with 0.5 links; oracle = literal per-round coin flips
        text = "node 0 0 0\nnode 1 100 0\nlink 0 1 0.5\n"
        net = topo.load_topology(io.StringIO(text))
        rounds = 10000
        etx = topo.simulate_hello_rounds(net, seed=7, rounds=rounds)
        for value in etx.values():
            assert 1.9 <= value <= 2.1
        oracle_rng = np.random.default_rng(12345)
        received = sum(1 for _ in range(rounds) if oracle_rng.random() < 0.5)
        assert 1.9 <= rounds / received <= 2.1

    def test_zero_receptions_clamped_to_rounds(self):
        text = "node 0 0 0\nnode 1 100 0\nlink 0 1 0.0001\n"
        net = topo.load_topology(io.StringIO(text))
        etx = topo.simulate_hello_rounds(net, seed=3, rounds=10)
        assert etx[(0, 1)] == 10.0

    def test_reproducible(self):
        net = topo.generate_grid(4, 100.0, 120.0, delivery_prob=0.8)
        a = topo.simulate_hello_rounds(net, seed=42, rounds=200)
        b = topo.simulate_hello_rounds(net, seed=42, rounds=200)
        assert a == b


class TestSinkGraph:
    def test_position_estimate_is_mean(self):
        net = topo.load_topology(io.StringIO("txrange 150\nnode 0 100 100\nnode 1 200 100\n"))
        etx = {(0, 1): 1.0, (1, 0): 1.0}
        obs = {0: [(90.0, 100.0), (110.0, 100.0)], 1: [(200.0, 100.0)]}
        graph = topo.build_sink_graph(net, etx, obs)
        assert graph.positions[0] == (100.0, 100.0)

    def test_lossless_graph_matches_ground_truth(self):
        net = topo.generate_grid(5, 100.0, 120.0)
        etx = topo.simulate_hello_rounds(net, seed=0, rounds=10)
        obs = {nid: [net.nodes[nid].position] for nid in net.nodes}
        graph = topo.build_sink_graph(net, etx, obs)
        assert graph.bidirectional_edges == net.in_range_pairs()

    def test_unobserved_node_raises(self):
        net = topo.generate_grid(2, 100.0, 150.0)
        etx = topo.simulate_hello_rounds(net, seed=0, rounds=10)
        obs = {nid: [net.nodes[nid].position] for nid in net.nodes}
        obs[3] = []
        with pytest.raises(IncompleteGraphError) as err:
            topo.build_sink_graph(net, etx, obs)
        assert err.value.missing_ids == [3]

    def test_threshold_excludes_bad_links(self):
        text = "node 0 0 0\nnode 1 100 0\nnode 2 200 0\nlink 0 1 1.0\nlink 1 2 0.1\n"
        net = topo.load_topology(io.StringIO(text))
        etx = topo.simulate_hello_rounds(net, seed=5, rounds=100)
        obs = {nid: [net.nodes[nid].position] for nid in net.nodes}
        graph = topo.build_sink_graph(net, etx, obs, etx_threshold=3.0)
        assert (0, 1) in graph.bidirectional_edges
        assert (1, 2) not in graph.bidirectional_edges

    @pytest.mark.parametrize("seed", range(5))
    def test_no_phantom_edges(self, seed):
        net = topo.generate_grid(6, 100.0, 130.0, delivery_prob=0.7)
        etx = topo.simulate_hello_rounds(net, seed=seed, rounds=50)
        obs = {nid: [net.nodes[nid].position] for nid in net.nodes}
        graph = topo.build_sink_graph(net, etx, obs)
        assert graph.bidirectional_edges <= net.in_range_pairs()

    def test_position_error_bounded_by_reception_range(self):
        from uwsnsim import mobility

        net = topo.generate_grid(8, 100.0, 120.0)
        trajectory = mobility.plan_sink_trip(net, 600.0)
        obs = topo.collect_sink_observations(net, trajectory.waypoints, trajectory.reception_range)
        etx = topo.simulate_hello_rounds(net, seed=0, rounds=10)
        graph = topo.build_sink_graph(net, etx, obs)
        for nid, est in graph.positions.items():
            assert math.dist(est, net.nodes[nid].position) <= trajectory.reception_range + 1e-9

    def test_csv_dumps(self):
        net = topo.generate_grid(2, 100.0, 150.0)
        graph = topo.NetworkGraph.from_topology(net)
        nodes_csv = topo.dump_nodes_csv(graph)
        edges_csv = topo.dump_edges_csv(graph)
        assert nodes_csv.splitlines()[0] == "node_id,x_est,y_est"
        assert len(nodes_csv.splitlines()) == 5
        assert edges_csv.splitlines()[0] == "from,to,etx"
        assert len(edges_csv.splitlines()) == 13  # 6 undirected pairs, both directions
