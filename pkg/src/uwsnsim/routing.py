"""Sink-side route computation.

The classic route-discovery protocols run here as computations over the
sink's global graph instead of as network floods: a label-correcting
request sweep stands in for the flooding phase (a node re-expands only on
a strict metric improvement, which keeps the sweep quadratic overall),
and the ledger counts every request/reply invocation as one sink
instruction. Greedy geographic forwarding and its sink-side hole fallback
live here too, together with the control-message model for the
distributed baselines.
"""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import MissingCoordinateError, UnreachableError

DEFAULT_ADDRESS_BYTES = 2  # S_a
DEFAULT_COORD_BYTES = 4  # S_c

_REL_EPS = 1e-9

PROTOCOLS = ("dsr", "aodv", "gpsr")


@dataclass
class SourceRoute:
    origin: int
    destination: int
    hop_sequence: list
    total_etx: float

    @property
    def hop_count(self):
        return len(self.hop_sequence) - 1

    def validate(self, graph):
        assert self.hop_sequence[0] == self.origin
        assert self.hop_sequence[-1] == self.destination
        assert len(set(self.hop_sequence)) == len(self.hop_sequence)
        total = 0.0
        for a, b in zip(self.hop_sequence, self.hop_sequence[1:]):
            assert graph.has_edge(a, b)
            total += graph.link_etx(a, b)
        assert abs(total - self.total_etx) <= 1e-9 * max(1.0, total)


@dataclass
class NextHopTable:
    owner: int
    entries: dict = field(default_factory=dict)
    forwarding_entries: int = 0


@dataclass
class CoordTable:
    owner: int
    entries: dict = field(default_factory=dict)


@dataclass
class OverheadLedger:
    protocol: str
    instructions: int = 0
    control_messages: int = 0
    header_bytes: dict = field(default_factory=dict)  # destination -> per-packet bytes
    table_bytes: dict = field(default_factory=dict)  # node -> bytes
    s_a: int = DEFAULT_ADDRESS_BYTES
    s_c: int = DEFAULT_COORD_BYTES

    @property
    def header_bytes_total(self):
        return sum(self.header_bytes.values())

    @property
    def table_bytes_max(self):
        return max(self.table_bytes.values(), default=0)

    def merge(self, other):
        self.instructions += other.instructions
        self.control_messages += other.control_messages
        for k, v in other.header_bytes.items():
            self.header_bytes[k] = self.header_bytes.get(k, 0) + v
        for k, v in other.table_bytes.items():
            self.table_bytes[k] = self.table_bytes.get(k, 0) + v
        return self


@dataclass
class RouteComputation:
    routes: dict  # destination -> SourceRoute
    errors: dict  # destination -> UnreachableError
    ledger: OverheadLedger
    tables: dict = field(default_factory=dict)  # owner -> NextHopTable (AODV)
    coord_table: CoordTable | None = None  # GPSR


def _request_sweep(graph, origin):
    """Shared request phase of the DSR/AODV computations.

    Every processed request costs one instruction; a request at an
    already-reached node with no strictly better metric returns without
    re-broadcasting. Returns (best metric, previous hop, instructions).
    """
    best_met = {origin: 0.0}
    best_prev = {origin: None}
    instructions = 1  # the RouteCreate call itself
    queue = deque()
    for nbr, w in graph.neighbors(origin):
        queue.append((nbr, w, origin))
    while queue:
        node, met, prev = queue.popleft()
        instructions += 1
        stored = best_met.get(node)
        if stored is not None and met >= stored - _REL_EPS * max(1.0, stored):
            continue
        best_met[node] = met
        best_prev[node] = prev
        for nbr, w in graph.neighbors(node):
            queue.append((nbr, met + w, node))
    return best_met, best_prev, instructions


def _backtrack(best_prev, origin, dest):
    path = [dest]
    while path[-1] != origin:
        path.append(best_prev[path[-1]])
    path.reverse()
    return path


def dsr_routes(graph, origin, destinations, s_a=DEFAULT_ADDRESS_BYTES):
    """Minimum-ETX source routes from one sweep serving all destinations.

    Each data packet carries the full hop sequence, so the ledger records
    s_a * hop_count header bytes per destination.
    """
    best_met, best_prev, instructions = _request_sweep(graph, origin)
    ledger = OverheadLedger("dsr", instructions=instructions, s_a=s_a)
    routes = {}
    errors = {}
    for dest in sorted(set(destinations)):
        if dest == origin:
            routes[dest] = SourceRoute(origin, dest, [origin], 0.0)
            continue
        if dest not in best_met:
            errors[dest] = UnreachableError(origin, dest)
            continue
        path = _backtrack(best_prev, origin, dest)
        routes[dest] = SourceRoute(origin, dest, path, best_met[dest])
        ledger.header_bytes[dest] = s_a * (len(path) - 1)
    return RouteComputation(routes, errors, ledger)


def aodv_tables(graph, origin, destinations, s_a=DEFAULT_ADDRESS_BYTES):
    """Next-hop tables via request sweep plus per-destination reply walks.

    The reply retraces stored previous hops from each destination back to
    the origin, installing a next-hop entry at every node it leaves;
    intermediate nodes count the entry in forwarding_entries (N_i). Table
    bytes follow (s_a*2)*own_entries + (s_a*2)*N_i.
    """
    best_met, best_prev, instructions = _request_sweep(graph, origin)
    ledger = OverheadLedger("aodv", instructions=instructions, s_a=s_a)
    routes = {}
    errors = {}
    tables = {origin: NextHopTable(origin)}
    for dest in sorted(set(destinations)):
        if dest == origin:
            continue
        if dest not in best_met:
            errors[dest] = UnreachableError(origin, dest)
            continue
        path = _backtrack(best_prev, origin, dest)
        routes[dest] = SourceRoute(origin, dest, path, best_met[dest])
        for i in range(len(path) - 2, -1, -1):
            ledger.instructions += 1  # one RouteReply invocation per walked hop
            node = path[i]
            table = tables.setdefault(node, NextHopTable(node))
            table.entries[dest] = path[i + 1]
            if node != origin:
                table.forwarding_entries += 1
    for node, table in tables.items():
        own = len(table.entries) if node == origin else 0
        ledger.table_bytes[node] = (s_a * 2) * own + (s_a * 2) * table.forwarding_entries
    return RouteComputation(routes, errors, ledger, tables=tables)


def gpsr_tables(graph, origin, destinations, s_c=DEFAULT_COORD_BYTES):
    """Coordinate table for the originator: one lookup per destination,
    no control traffic."""
    ledger = OverheadLedger("gpsr", s_c=s_c)
    table = CoordTable(origin)
    for dest in destinations:
        ledger.instructions += 1  # FindCoordinate
        if dest not in graph.positions:
            raise MissingCoordinateError(dest)
        table.entries[dest] = graph.positions[dest]
    ledger.table_bytes[origin] = (s_c * 2) * len(table.entries)
    return RouteComputation({}, {}, ledger, coord_table=table)


def gpsr_forward(current, dest_coord, graph):
    """Greedy step: the neighbor strictly closest to the destination
    coordinate, or None when the current node is a local minimum (hole)."""
    here = graph.positions[current]
    best_id = None
    best_d = math.dist(here, dest_coord) - 1e-12
    for nbr, _w in graph.neighbors(current):
        d = math.dist(graph.positions[nbr], dest_coord)
        if d < best_d:
            best_d = d
            best_id = nbr
    return best_id


def resolve_gpsr_hole(graph, stuck_node, dest):
    """Sink-side fallback for greedy holes: substitute the minimum-ETX
    path from the stuck node (perimeter routing is out of scope)."""
    if stuck_node == dest:
        return SourceRoute(stuck_node, dest, [stuck_node], 0.0)
    return shortest_etx_oracle(graph, stuck_node, dest)


def gpsr_route(graph, src, dest):
    """Full greedy walk towards the destination's coordinate estimate.

    Returns (SourceRoute, holes) where holes counts greedy dead ends that
    were bridged by the sink-side fallback.
    """
    if src == dest:
        return SourceRoute(src, dest, [src], 0.0), 0
    coord = graph.positions[dest]
    path = [src]
    holes = 0
    while path[-1] != dest:
        nxt = gpsr_forward(path[-1], coord, graph)
        if nxt is None or nxt in path:
            holes += 1
            tail = resolve_gpsr_hole(graph, path[-1], dest)
            for node in tail.hop_sequence[1:]:
                if node in path:  # fallback may cross the walked prefix
                    path = path[: path.index(node) + 1]
                else:
                    path.append(node)
            break
        path.append(nxt)
    total = 0.0
    for a, b in zip(path, path[1:]):
        total += graph.link_etx(a, b)
    return SourceRoute(src, dest, path, total), holes


def shortest_etx_oracle(graph, a, b):
    """Provably minimum-ETX route; equal-cost ties resolve to the
    lexicographically smallest hop sequence."""
    if a == b:
        return SourceRoute(a, b, [a], 0.0)
    indptr, indices, weights = graph.csr()
    ia, ib = graph.index_of(a), graph.index_of(b)
    dist_f, _ = kernels.dijkstra(indptr, indices, weights, ia)
    if not np.isfinite(dist_f[ib]):
        raise UnreachableError(a, b)
    rp, ri, rw = _transpose_csr(indptr, indices, weights)
    dist_r, _ = kernels.dijkstra(rp, ri, rw, ib)
    total = dist_f[ib]
    eps = _REL_EPS * max(1.0, total)
    path = [a]
    u = a
    while u != b:
        iu = graph.index_of(u)
        nxt = None
        for nbr, w in graph.neighbors(u):  # sorted by id
            iv = graph.index_of(nbr)
            if abs(dist_f[iu] + w + dist_r[iv] - total) <= eps:
                nxt = nbr
                break
        assert nxt is not None, "shortest-path DAG walk lost the trail"
        path.append(nxt)
        u = nxt
    return SourceRoute(a, b, path, float(total))


def _transpose_csr(indptr, indices, weights):
    n = indptr.shape[0] - 1
    counts = np.zeros(n, dtype=np.int64)
    for v in indices:
        counts[v] += 1
    rp = np.zeros(n + 1, dtype=np.int64)
    rp[1:] = np.cumsum(counts)
    ri = np.empty_like(indices)
    rw = np.empty_like(weights)
    cursor = rp[:-1].copy()
    for u in range(n):
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            ri[cursor[v]] = u
            rw[cursor[v]] = weights[e]
            cursor[v] += 1
    return rp, ri, rw


@dataclass
class ControlMessageModel:
    """Network-side control message counts for one sink trip."""

    flows: int
    traditional_request: int
    traditional_reply: int
    centralized_request: int
    centralized_reply: int
    table_distribution: int


def distributed_overhead_model(graph, flows):
    """Message counts of on-node route discovery versus the sink-side scheme.

    Traditional discovery floods one request per datum (every node
    rebroadcasts once: n messages) and unicasts one reply per destination
    along the found path. The centralized variants exchange no
    request/reply traffic at all; they pay one table-distribution message
    per node per trip.
    """
    n = len(graph)
    request = 0
    reply = 0
    for origin, destinations in flows:
        request += n
        result = dsr_routes(graph, origin, destinations)
        for dest in destinations:
            route = result.routes.get(dest)
            if route is not None:
                reply += route.hop_count
    return ControlMessageModel(
        flows=len(flows),
        traditional_request=request,
        traditional_reply=reply,
        centralized_request=0,
        centralized_reply=0,
        table_distribution=n if flows else 0,
    )


def routes_for_protocol(graph, protocol, origin, destinations, s_a=DEFAULT_ADDRESS_BYTES, s_c=DEFAULT_COORD_BYTES):
    """Uniform entry point used by the engine: concrete per-destination
    routes plus the protocol's ledger. GPSR routes come from greedy walks
    over the coordinate table, with hole fallbacks counted."""
    if protocol == "dsr":
        result = dsr_routes(graph, origin, destinations, s_a=s_a)
        return result, 0
    if protocol == "aodv":
        result = aodv_tables(graph, origin, destinations, s_a=s_a)
        return result, 0
    if protocol == "gpsr":
        result = gpsr_tables(graph, origin, destinations, s_c=s_c)
        holes = 0
        for dest in sorted(set(destinations)):
            route, h = gpsr_route(graph, origin, dest)
            holes += h
            result.routes[dest] = route
        return result, holes
    raise ValueError(f"unknown protocol {protocol!r}")
