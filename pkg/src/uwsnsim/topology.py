"""Sensor network construction: grids, file-loaded layouts, lossy links,
HELLO/ETX estimation, and the sink-side bidirectional graph."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DuplicateNodeIdError,
    EmptyTopologyError,
    IncompleteGraphError,
    MalformedRecordError,
    TopologyError,
    UnreachableError,
)

_EPS = 1e-9

# Links above this ETX are unusable and excluded from the sink graph.
DEFAULT_ETX_THRESHOLD = 3.0


@dataclass(frozen=True)
class SensorNode:
    id: int
    position: tuple[float, float]
    tx_range: float


class Topology:
    """Ground-truth deployment: node positions plus directed lossy links.

    Immutable after construction; safe to share across scenario runs.
    """

    def __init__(self, nodes, delivery_prob=1.0, explicit_links=None, kind="irregular", spacing=None):
        if not nodes:
            raise EmptyTopologyError()
        self.nodes = {}
        for node in nodes:
            if node.id in self.nodes:
                raise DuplicateNodeIdError(node.id)
            if node.tx_range <= 0:
                raise TopologyError(f"node {node.id}: tx_range must be positive")
            self.nodes[node.id] = node
        self.kind = kind
        self.spacing = spacing
        # delivery_prob keyed by directed pair
        if explicit_links is not None:
            self.links = dict(explicit_links)
        else:
            self.links = {}
            if delivery_prob <= 0 or delivery_prob > 1:
                raise TopologyError("delivery_prob must be in (0, 1]")
            for a, b in self._in_range_pairs():
                self.links[(a, b)] = delivery_prob
                self.links[(b, a)] = delivery_prob
        self._warn_if_disconnected()

    def _in_range_pairs(self):
        ids = sorted(self.nodes)
        pairs = []
        for i, a in enumerate(ids):
            na = self.nodes[a]
            for b in ids[i + 1 :]:
                nb = self.nodes[b]
                d = math.dist(na.position, nb.position)
                if d <= na.tx_range + _EPS and d <= nb.tx_range + _EPS:
                    pairs.append((a, b))
        return pairs

    def in_range_pairs(self):
        """Undirected (a, b) pairs with links in both directions."""
        return {(min(a, b), max(a, b)) for (a, b) in self.links if (b, a) in self.links}

    def neighbors(self, node_id):
        return sorted(b for (a, b) in self.links if a == node_id)

    def positions(self):
        return {i: n.position for i, n in self.nodes.items()}

    def _warn_if_disconnected(self):
        ids = sorted(self.nodes)
        if len(ids) == 1:
            self.connected = True
            return
        adj = {i: set() for i in ids}
        for a, b in self.in_range_pairs():
            adj[a].add(b)
            adj[b].add(a)
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        self.connected = len(seen) == len(ids)
        if not self.connected:
            warnings.warn(
                f"topology is disconnected ({len(ids) - len(seen)} nodes unreachable "
                "from the lowest id)",
                stacklevel=3,
            )

    def __len__(self):
        return len(self.nodes)


def generate_lattice(nx_count, ny_count, spacing, tx_range, delivery_prob=1.0):
    """Rectangular lattice, row-major ids, positions (i*spacing, j*spacing)."""
    if nx_count < 1 or ny_count < 1:
        raise TopologyError("lattice dimensions must be positive")
    if spacing <= 0 or tx_range <= 0:
        raise TopologyError("spacing and tx_range must be positive")
    nodes = [
        SensorNode(j * nx_count + i, (i * spacing, j * spacing), tx_range)
        for j in range(ny_count)
        for i in range(nx_count)
    ]
    return Topology(nodes, delivery_prob, kind="grid", spacing=spacing)


def generate_grid(side, spacing, tx_range, delivery_prob=1.0):
    """Square side x side grid."""
    if side < 2:
        raise TopologyError("grid side must be >= 2")
    return generate_lattice(side, side, spacing, tx_range, delivery_prob)


def generate_line(count, spacing, tx_range, delivery_prob=1.0):
    """Corridor layout: nodes on the x axis in id order."""
    if count < 1:
        raise TopologyError("line must have at least one node")
    if spacing <= 0 or tx_range <= 0:
        raise TopologyError("spacing and tx_range must be positive")
    nodes = [SensorNode(i, (i * spacing, 0.0), tx_range) for i in range(count)]
    return Topology(nodes, delivery_prob, kind="line", spacing=spacing)


def load_topology(source, default_tx_range=None, delivery_prob=1.0):
    """Parse a topology file.

    Line-oriented text, `#` comments, whitespace-separated fields:
        txrange <r>                   global default range
        node <id> <x> <y> [tx_range]
        link <a> <b> [delivery_prob]  explicit link (both directions)
    Explicit link records override range-derived links entirely.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    tx_range = default_tx_range
    raw_nodes = []
    raw_links = []
    seen_ids = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0].lower()
        try:
            if kind == "txrange":
                tx_range = float(fields[1])
            elif kind == "node":
                nid = int(fields[1])
                if nid < 0:
                    raise ValueError("negative id")
                if nid in seen_ids:
                    raise DuplicateNodeIdError(nid)
                seen_ids.add(nid)
                x, y = float(fields[2]), float(fields[3])
                r = float(fields[4]) if len(fields) > 4 else None
                raw_nodes.append((nid, (x, y), r))
            elif kind == "link":
                a, b = int(fields[1]), int(fields[2])
                p = float(fields[3]) if len(fields) > 3 else 1.0
                if not 0 < p <= 1:
                    raise ValueError("delivery_prob out of (0,1]")
                raw_links.append((a, b, p))
            else:
                raise ValueError(f"unknown record type {kind!r}")
        except DuplicateNodeIdError:
            raise
        except (IndexError, ValueError) as exc:
            raise MalformedRecordError(line_no, raw, str(exc)) from exc
    if not raw_nodes:
        raise EmptyTopologyError()
    nodes = []
    for nid, pos, r in raw_nodes:
        r = r if r is not None else tx_range
        if r is None:
            if not raw_links:
                raise MalformedRecordError(
                    0, f"node {nid}", "no tx_range given and no txrange default"
                )
            r = math.inf  # explicit links make range irrelevant
        nodes.append(SensorNode(nid, pos, r))
    if raw_links:
        for a, b, _ in raw_links:
            if a not in seen_ids or b not in seen_ids:
                raise MalformedRecordError(0, f"link {a} {b}", "link references unknown node")
        links = {}
        for a, b, p in raw_links:
            links[(a, b)] = p
            links[(b, a)] = p
        return Topology(nodes, explicit_links=links, kind="loaded")
    return Topology(nodes, delivery_prob, kind="loaded")


def simulate_hello_rounds(topology, seed, rounds):
    """Per-directed-link ETX estimates from `rounds` simulated HELLO beacons.

    Each round every link delivers with its delivery_prob (Bernoulli);
    etx = rounds / max(1, received). Deterministic for a given seed;
    lossless links draw no randomness and report exactly 1.0.
    """
    if rounds < 1:
        raise TopologyError("rounds must be >= 1")
    rng = np.random.default_rng(seed)
    etx = {}
    for link in sorted(topology.links):
        p = topology.links[link]
        if p >= 1.0:
            etx[link] = 1.0
            continue
        received = int((rng.random(rounds) < p).sum())
        etx[link] = rounds / max(1, received)
    return etx


class NetworkGraph:
    """The sink's world model: position estimates plus directed ETX on
    pairs observed usable in both directions.

    Node ids map to dense indices internally; hop distances and CSR views
    are cached after first use.
    """

    def __init__(self, positions, etx):
        if not positions:
            raise EmptyTopologyError()
        self.node_ids = sorted(positions)
        self._idx = {nid: i for i, nid in enumerate(self.node_ids)}
        self.positions = dict(positions)
        self.adj = {nid: [] for nid in self.node_ids}
        self.bidirectional_edges = set()
        for (a, b), w in etx.items():
            if w < 1.0 - _EPS:
                raise TopologyError(f"etx for link {a}->{b} below 1")
        for (a, b), w in sorted(etx.items()):
            if (b, a) not in etx:
                continue
            self.adj[a].append((b, w))
            self.bidirectional_edges.add((min(a, b), max(a, b)))
        self.etx = {k: v for k, v in etx.items() if (k[1], k[0]) in etx}
        self._csr_cache = None
        self._hop_cache = None

    @classmethod
    def from_topology(cls, topology):
        """Ground-truth shortcut: true positions, ETX exactly 1."""
        etx = {}
        for a, b in topology.in_range_pairs():
            etx[(a, b)] = 1.0
            etx[(b, a)] = 1.0
        return cls(topology.positions(), etx)

    def __len__(self):
        return len(self.node_ids)

    def index_of(self, node_id):
        return self._idx[node_id]

    def neighbors(self, node_id):
        return self.adj[node_id]

    def neighbor_ids(self, node_id):
        return [b for b, _ in self.adj[node_id]]

    def has_edge(self, a, b):
        return (min(a, b), max(a, b)) in self.bidirectional_edges

    def link_etx(self, a, b):
        return self.etx[(a, b)]

    def euclidean(self, a, b):
        return math.dist(self.positions[a], self.positions[b])

    def csr(self):
        if self._csr_cache is None:
            n = len(self.node_ids)
            indptr = np.zeros(n + 1, dtype=np.int64)
            indices = []
            weights = []
            for i, nid in enumerate(self.node_ids):
                for b, w in self.adj[nid]:
                    indices.append(self._idx[b])
                    weights.append(w)
                indptr[i + 1] = len(indices)
            self._csr_cache = (
                indptr,
                np.asarray(indices, dtype=np.int64),
                np.asarray(weights, dtype=np.float64),
            )
        return self._csr_cache

    def hop_matrix(self):
        """All-pairs hop counts (int32, -1 where unreachable)."""
        if self._hop_cache is None:
            indptr, indices, _ = self.csr()
            self._hop_cache = kernels.all_hops(indptr, indices)
        return self._hop_cache

    def hop_distance(self, a, b):
        h = int(self.hop_matrix()[self._idx[a], self._idx[b]])
        if h < 0:
            raise UnreachableError(a, b)
        return h


def collect_sink_observations(topology, waypoints, reception_range):
    """Sink coordinates recorded per node: at each waypoint the sink logs
    its own position against every node whose HELLO it can hear there."""
    obs = {nid: [] for nid in topology.nodes}
    for wp in waypoints:
        for nid, node in topology.nodes.items():
            if math.dist(node.position, wp) <= reception_range + _EPS:
                obs[nid].append(wp)
    return obs


def build_sink_graph(topology, hello_etx, sink_observations, etx_threshold=DEFAULT_ETX_THRESHOLD):
    """Assemble the sink's NetworkGraph from a completed trip.

    Position estimate per node is the mean of the sink coordinates at
    HELLO-reception instants; an edge enters the graph only when both
    directions report ETX at or below the usability threshold.
    """
    missing = [nid for nid in topology.nodes if not sink_observations.get(nid)]
    if missing:
        raise IncompleteGraphError(missing)
    positions = {}
    for nid in topology.nodes:
        pts = sink_observations[nid]
        positions[nid] = (
            sum(p[0] for p in pts) / len(pts),
            sum(p[1] for p in pts) / len(pts),
        )
    usable = {}
    for (a, b), w in hello_etx.items():
        if w <= etx_threshold and hello_etx.get((b, a), math.inf) <= etx_threshold:
            usable[(a, b)] = w
    return NetworkGraph(positions, usable)


def dump_nodes_csv(graph):
    lines = ["node_id,x_est,y_est"]
    for nid in graph.node_ids:
        x, y = graph.positions[nid]
        lines.append(f"{nid},{x:.6g},{y:.6g}")
    return "\n".join(lines) + "\n"


def dump_edges_csv(graph):
    lines = ["from,to,etx"]
    for a in graph.node_ids:
        for b, w in graph.adj[a]:
            lines.append(f"{a},{b},{w:.6g}")
    return "\n".join(lines) + "\n"
