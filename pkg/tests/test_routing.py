import itertools

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as scipy_dijkstra

from uwsnsim import routing, topology as topo
from uwsnsim.errors import MissingCoordinateError, UnreachableError
from uwsnsim.topology import NetworkGraph


def line3():
    positions = {0: (0.0, 0.0), 1: (100.0, 0.0), 2: (200.0, 0.0)}
    etx = {}
    for a, b in ((0, 1), (1, 2)):
        etx[(a, b)] = 1.0
        etx[(b, a)] = 1.0
    return NetworkGraph(positions, etx)


def diamond(slow_leg=3.0):
    positions = {0: (0.0, 0.0), 1: (100.0, 100.0), 2: (100.0, -100.0), 3: (200.0, 0.0)}
    etx = {}
    for a, b, w in ((0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, slow_leg)):
        etx[(a, b)] = w
        etx[(b, a)] = w
    return NetworkGraph(positions, etx)


def grid_graph(side=10, tx=120.0):
    return NetworkGraph.from_topology(topo.generate_grid(side, 100.0, tx))


def random_graph(rng, n):
    """Connected digraph: random attachment tree plus chords, ETX in [1,3]."""
    positions = {i: (float(rng.random() * 1000), float(rng.random() * 1000)) for i in range(n)}
    order = list(rng.permutation(n))
    etx = {}

    def add(a, b):
        etx[(a, b)] = float(1 + 2 * rng.random())
        etx[(b, a)] = float(1 + 2 * rng.random())

    for i in range(1, n):
        add(order[i], order[int(rng.integers(i))])
    for _ in range(n):
        a, b = int(rng.integers(n)), int(rng.integers(n))
        if a != b and (a, b) not in etx:
            add(a, b)
    return NetworkGraph(positions, etx)


def scipy_costs(graph, origin):
    indptr, indices, weights = graph.csr()
    n = len(graph.node_ids)
    mat = csr_matrix((weights, indices, indptr), shape=(n, n))
    return scipy_dijkstra(mat, indices=graph.index_of(origin))


class TestDsr:
    def test_three_node_line(self):
        graph = line3()
        result = routing.dsr_routes(graph, 0, [2])
        route = result.routes[2]
        assert route.hop_sequence == [0, 1, 2]
        assert route.total_etx == 2.0
        route.validate(graph)

    def test_diamond_prefers_cheap_leg(self):
        result = routing.dsr_routes(diamond(), 0, [3])
        assert result.routes[3].hop_sequence == [0, 1, 3]
        assert result.routes[3].total_etx == 2.0

    def test_grid_costs_match_scipy_oracle(self):
        graph = grid_graph()
        rng = np.random.default_rng(0)
        dests = [int(x) for x in rng.choice(99, 5, replace=False) + 1]
        result = routing.dsr_routes(graph, 0, dests)
        oracle = scipy_costs(graph, 0)
        for dest in dests:
            assert result.routes[dest].total_etx == pytest.approx(
                oracle[graph.index_of(dest)]
            )

    def test_header_bytes_formula(self):
        graph = grid_graph()
        result = routing.dsr_routes(graph, 0, [99, 45], s_a=2)
        for dest, route in result.routes.items():
            assert result.ledger.header_bytes[dest] == 2 * route.hop_count

    def test_unreachable_reported_per_destination(self):
        positions = {0: (0.0, 0.0), 1: (100.0, 0.0), 2: (900.0, 0.0)}
        etx = {(0, 1): 1.0, (1, 0): 1.0}
        graph = NetworkGraph(positions, etx)
        result = routing.dsr_routes(graph, 0, [1, 2])
        assert 1 in result.routes
        assert isinstance(result.errors[2], UnreachableError)

    def test_no_control_messages(self):
        result = routing.dsr_routes(grid_graph(), 0, [99])
        assert result.ledger.control_messages == 0


class TestAodv:
    def test_three_node_line_tables(self):
        result = routing.aodv_tables(line3(), 0, [2])
        assert result.tables[0].entries == {2: 1}
        assert result.tables[1].entries == {2: 2}
        assert result.tables[1].forwarding_entries == 1
        assert result.tables[0].forwarding_entries == 0

    def test_diamond_cost_equals_dijkstra(self):
        result = routing.aodv_tables(diamond(), 0, [3])
        oracle = scipy_costs(diamond(), 0)
        assert result.routes[3].total_etx == pytest.approx(oracle[3])

    def test_origin_as_destination_degenerate(self):
        result = routing.aodv_tables(line3(), 0, [0])
        assert result.tables[0].entries == {}
        assert result.ledger.control_messages == 0

    def test_table_bytes_formula(self):
        graph = grid_graph()
        rng = np.random.default_rng(1)
        dests = [int(x) for x in rng.choice(99, 5, replace=False) + 1]
        result = routing.aodv_tables(graph, 0, dests, s_a=2)
        n_i = {}
        for dest, route in result.routes.items():
            for node in route.hop_sequence[1:-1]:
                n_i[node] = n_i.get(node, 0) + 1
        for node, table in result.tables.items():
            own = len(dests) if node == 0 else 0
            expected = (2 * 2) * own if node == 0 else (2 * 2) * n_i.get(node, 0)
            assert result.ledger.table_bytes[node] == expected

    @pytest.mark.parametrize("seed", range(10))
    def test_next_hop_chains_loop_free(self, seed):
        rng = np.random.default_rng(seed)
        graph = random_graph(rng, 30)
        origin = int(rng.integers(30))
        dests = [int(x) for x in rng.choice([i for i in range(30) if i != origin], 5, replace=False)]
        result = routing.aodv_tables(graph, origin, dests)
        for dest in dests:
            node = origin
            hops = 0
            while node != dest:
                node = result.tables[node].entries[dest]
                hops += 1
                assert hops <= 30


class TestGpsr:
    def test_table_size_and_bytes(self):
        graph = grid_graph()
        dests = [10, 20, 30, 40, 50]
        result = routing.gpsr_tables(graph, 0, dests, s_c=4)
        assert len(result.coord_table.entries) == 5
        assert result.ledger.table_bytes[0] == (4 * 2) * 5 == 40
        assert result.ledger.instructions == 5
        assert result.ledger.control_messages == 0

    def test_empty_destinations(self):
        result = routing.gpsr_tables(grid_graph(), 0, [])
        assert result.coord_table.entries == {}
        assert result.ledger.table_bytes[0] == 0

    def test_all_origins_instruction_count(self):
        graph = grid_graph()
        rng = np.random.default_rng(0)
        total = 0
        for origin in graph.node_ids:
            others = [n for n in graph.node_ids if n != origin]
            dests = [int(x) for x in rng.choice(others, 5, replace=False)]
            total += routing.gpsr_tables(graph, origin, dests).ledger.instructions
        assert total == 100 * 5

    def test_missing_coordinate(self):
        with pytest.raises(MissingCoordinateError):
            routing.gpsr_tables(grid_graph(), 0, [12345])

    def test_forward_moves_east(self):
        graph = grid_graph()
        nxt = routing.gpsr_forward(44, graph.positions[49], graph)
        assert nxt == 45

    def test_forward_stuck_at_local_minimum(self):
        # current node closer to target than every neighbor -> hole
        positions = {0: (0.0, 0.0), 1: (-100.0, 0.0), 2: (-200.0, 0.0), 3: (300.0, 0.0)}
        etx = {}
        for a, b in ((0, 1), (1, 2), (2, 3)):
            etx[(a, b)] = 1.0
            etx[(b, a)] = 1.0
        graph = NetworkGraph(positions, etx)
        assert routing.gpsr_forward(0, graph.positions[3], graph) is None

    def test_greedy_walks_on_grid_never_stick(self):
        graph = grid_graph()
        holes = 0
        for src, dest in itertools.permutations(graph.node_ids, 2):
            route, h = routing.gpsr_route(graph, src, dest)
            holes += h
        assert holes == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_greedy_walk_within_twice_bfs(self, seed):
        graph = grid_graph()
        hop = graph.hop_matrix()
        rng = np.random.default_rng(seed)
        src, dest = (int(x) for x in rng.choice(100, 2, replace=False))
        route, _holes = routing.gpsr_route(graph, src, dest)
        assert route.hop_count <= 2 * hop[graph.index_of(src), graph.index_of(dest)]

    def test_hole_fallback_equals_oracle(self):
        positions = {0: (0.0, 0.0), 1: (-100.0, 0.0), 2: (-200.0, 0.0), 3: (300.0, 0.0)}
        etx = {}
        for a, b in ((0, 1), (1, 2), (2, 3)):
            etx[(a, b)] = 1.0
            etx[(b, a)] = 1.0
        graph = NetworkGraph(positions, etx)
        fallback = routing.resolve_gpsr_hole(graph, 0, 3)
        oracle = routing.shortest_etx_oracle(graph, 0, 3)
        assert fallback.hop_sequence == oracle.hop_sequence
        route, holes = routing.gpsr_route(graph, 0, 3)
        assert holes == 1
        assert route.hop_sequence == [0, 1, 2, 3]

    def test_stuck_node_is_destination(self):
        route = routing.resolve_gpsr_hole(grid_graph(), 7, 7)
        assert route.hop_sequence == [7]
        assert route.total_etx == 0.0


class TestOracle:
    def test_single_edge(self):
        graph = line3()
        route = routing.shortest_etx_oracle(graph, 0, 1)
        assert route.hop_sequence == [0, 1]
        assert route.total_etx == 1.0

    def test_equal_cost_tie_breaks_lexicographically(self):
        graph = diamond(slow_leg=1.0)
        route = routing.shortest_etx_oracle(graph, 0, 3)
        assert route.hop_sequence == [0, 1, 3]

    def test_unreachable(self):
        positions = {0: (0.0, 0.0), 1: (100.0, 0.0), 2: (900.0, 0.0)}
        etx = {(0, 1): 1.0, (1, 0): 1.0}
        graph = NetworkGraph(positions, etx)
        with pytest.raises(UnreachableError):
            routing.shortest_etx_oracle(graph, 0, 2)

    @pytest.mark.parametrize("seed", range(20))
    def test_oracle_never_beaten_on_random_graphs(self, seed):
        rng = np.random.default_rng(seed)
        graph = random_graph(rng, 25)
        origin = int(rng.integers(25))
        dests = [int(x) for x in rng.choice([i for i in range(25) if i != origin], 4, replace=False)]
        dsr = routing.dsr_routes(graph, origin, dests)
        aodv = routing.aodv_tables(graph, origin, dests)
        for dest in dests:
            oracle = routing.shortest_etx_oracle(graph, origin, dest)
            oracle.validate(graph)
            assert dsr.routes[dest].total_etx == pytest.approx(oracle.total_etx)
            assert aodv.routes[dest].total_etx == pytest.approx(oracle.total_etx)


class TestDistributedOverhead:
    def test_single_flow_floods_whole_network(self):
        graph = NetworkGraph.from_topology(topo.generate_line(50, 100.0, 150.0))
        model = routing.distributed_overhead_model(graph, [(0, [10, 20, 30])])
        assert model.traditional_request == 50
        assert model.centralized_request == 0
        assert model.centralized_reply == 0

    def test_zero_flows_zero_everywhere(self):
        graph = line3()
        model = routing.distributed_overhead_model(graph, [])
        assert model.traditional_request == 0
        assert model.traditional_reply == 0
        assert model.table_distribution == 0

    def test_per_trip_load_scales_with_nodes(self):
        graph = NetworkGraph.from_topology(topo.generate_line(50, 100.0, 150.0))
        rng = np.random.default_rng(0)
        flows = []
        for origin in graph.node_ids:
            others = [n for n in graph.node_ids if n != origin]
            flows.append((origin, [int(x) for x in rng.choice(others, 5, replace=False)]))
        model = routing.distributed_overhead_model(graph, flows)
        assert model.traditional_request == 50 * 50
        assert model.traditional_reply > 0
