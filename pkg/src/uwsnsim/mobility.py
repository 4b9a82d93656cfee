"""Sink trip planning and attacker mobility models."""

import math
from dataclasses import dataclass, field

from .errors import ConfigError, EmptyTopologyError

ATTACKER_MODELS = ("manhattan", "line_sweep", "circular_sweep", "stationary")


@dataclass
class SinkTrajectory:
    order: list
    waypoints: list
    trip_duration: float
    visit_schedule: dict
    reception_range: float

    def __post_init__(self):
        assert all(self.visit_schedule.get(n) for n in self.order)


def _row_key(y):
    return round(y, 6)


def _boustrophedon_order(topology):
    rows = {}
    for nid, node in topology.nodes.items():
        rows.setdefault(_row_key(node.position[1]), []).append(nid)
    order = []
    for r, (y, ids) in enumerate(sorted(rows.items())):
        ids.sort(key=lambda nid: topology.nodes[nid].position[0])
        if r % 2:
            ids.reverse()
        order.extend(ids)
    return order


def _nearest_neighbor_order(topology):
    remaining = set(topology.nodes)
    start = min(remaining, key=lambda nid: (topology.nodes[nid].position, nid))
    order = [start]
    remaining.remove(start)
    while remaining:
        here = topology.nodes[order[-1]].position
        nxt = min(
            remaining,
            key=lambda nid: (math.dist(here, topology.nodes[nid].position), nid),
        )
        order.append(nxt)
        remaining.remove(nxt)
    return order


def _default_reception_range(topology):
    if topology.spacing:
        return 1.5 * topology.spacing
    # largest nearest-neighbor gap, padded, so every node is heard
    worst = 0.0
    for nid, node in topology.nodes.items():
        dists = [
            math.dist(node.position, other.position)
            for oid, other in topology.nodes.items()
            if oid != nid
        ]
        if dists:
            worst = max(worst, min(dists))
    return 1.5 * worst if worst else 1.0


def plan_sink_trip(topology, trip_duration, reception_range=None):
    """Tour visiting every node once per trip with uniformly spread times.

    Grids and lines get a row-by-row (boustrophedon) sweep; irregular
    layouts get a nearest-neighbor tour. Waypoints are the node positions
    themselves, so the sink passes within reception range of each node.
    """
    if trip_duration <= 0:
        raise ConfigError("trip_duration must be positive")
    if not topology.nodes:
        raise EmptyTopologyError()
    if topology.kind in ("grid", "line"):
        order = _boustrophedon_order(topology)
    else:
        order = _nearest_neighbor_order(topology)
    n = len(order)
    step = trip_duration / n
    schedule = {nid: [i * step] for i, nid in enumerate(order)}
    return SinkTrajectory(
        order=order,
        waypoints=[topology.nodes[nid].position for nid in order],
        trip_duration=trip_duration,
        visit_schedule=schedule,
        reception_range=(
            reception_range if reception_range is not None else _default_reception_range(topology)
        ),
    )


def _line_axis_order(topology):
    xs = [n.position[0] for n in topology.nodes.values()]
    ys = [n.position[1] for n in topology.nodes.values()]
    axis = 0 if (max(xs) - min(xs)) >= (max(ys) - min(ys)) else 1
    return sorted(topology.nodes, key=lambda nid: (topology.nodes[nid].position[axis], nid))


def _circular_order(topology):
    cx = sum(n.position[0] for n in topology.nodes.values()) / len(topology.nodes)
    cy = sum(n.position[1] for n in topology.nodes.values()) / len(topology.nodes)
    return sorted(
        topology.nodes,
        key=lambda nid: (
            math.atan2(topology.nodes[nid].position[1] - cy, topology.nodes[nid].position[0] - cx),
            nid,
        ),
    )


def _orthogonal_neighbors(topology, node_id):
    """Lattice moves: nodes one spacing away along exactly one axis."""
    here = topology.nodes[node_id].position
    spacing = topology.spacing
    out = []
    for nid, node in topology.nodes.items():
        if nid == node_id:
            continue
        dx = abs(node.position[0] - here[0])
        dy = abs(node.position[1] - here[1])
        if spacing is not None:
            if (abs(dx - spacing) < 1e-6 and dy < 1e-6) or (
                abs(dy - spacing) < 1e-6 and dx < 1e-6
            ):
                out.append(nid)
        elif (dx < 1e-6) != (dy < 1e-6):
            out.append(nid)
    return sorted(out)


@dataclass
class AttackerState:
    attacker_id: int
    model: str
    speed: float
    seizure_time: float
    current: int
    prev: int | None = None
    direction: int = 1
    visited: set = field(default_factory=set)
    time_credit: float = 0.0
    pending_target: int | None = None
    attacks: int = 0
    _order: list = field(default_factory=list)
    _order_pos: int = 0

    def __post_init__(self):
        if self.speed <= 0:
            raise ConfigError("attacker speed must be positive")
        if self.seizure_time < 0:
            raise ConfigError("seizure_time must be non-negative")
        if self.model not in ATTACKER_MODELS:
            raise ConfigError(f"unknown attacker model {self.model!r}")


def make_attacker(topology, attacker_id, model, speed, seizure_time, start, direction=1):
    """Build attacker state anchored at `start` (a node id)."""
    state = AttackerState(
        attacker_id=attacker_id,
        model=model,
        speed=speed,
        seizure_time=seizure_time,
        current=start,
        direction=1 if direction >= 0 else -1,
    )
    if model == "line_sweep":
        state._order = _line_axis_order(topology)
        state._order_pos = state._order.index(start)
    elif model == "circular_sweep":
        state._order = _circular_order(topology)
        state._order_pos = state._order.index(start)
    return state


def _choose_target(state, topology, rng):
    """Next node to attack. Sweep models (and stationary) open by seizing
    their start node; the random walk always travels first."""
    if state.model == "stationary":
        return state.current
    if state.model in ("line_sweep", "circular_sweep"):
        if state.attacks == 0:
            return state.current
        pos = state._order_pos + state.direction
        if state.model == "circular_sweep":
            pos %= len(state._order)
        elif pos < 0 or pos >= len(state._order):
            state.direction = -state.direction
            pos = state._order_pos + state.direction
        return state._order[pos]
    # manhattan walk over lattice moves, no immediate backtrack unless forced
    options = _orthogonal_neighbors(topology, state.current)
    if not options:
        return state.current
    if state.prev in options and len(options) > 1:
        options = [o for o in options if o != state.prev]
    return options[int(rng.integers(len(options)))]


def _commit_attack(state, target):
    state.prev = state.current
    state.current = target
    if state._order:
        state._order_pos = state._order.index(target)
    state.visited.add(target)
    state.attacks += 1
    state.pending_target = None


def attacker_step(state, topology, rng):
    """Advance exactly one attack (the engine's round unit); returns the
    node attacked."""
    if state.pending_target is None:
        state.pending_target = _choose_target(state, topology, rng)
    target = state.pending_target
    _commit_attack(state, target)
    return target


def advance_attacker(state, topology, elapsed, rng):
    """Time-based advance: alternating travel (distance/speed) and seizure
    (seizure_time per node). Returns (state, attacked node ids)."""
    if elapsed < 0:
        raise ConfigError("elapsed must be non-negative")
    budget = state.time_credit + elapsed
    attacked = []
    while True:
        if state.pending_target is None:
            state.pending_target = _choose_target(state, topology, rng)
        target = state.pending_target
        travel = math.dist(
            topology.nodes[state.current].position, topology.nodes[target].position
        )
        cost = travel / state.speed + state.seizure_time
        if budget + 1e-9 < cost:
            break
        budget -= cost
        _commit_attack(state, target)
        attacked.append(target)
    state.time_credit = budget
    return state, attacked
