"""Round-based simulation: data generation, fragment dispersal over
computed routes, sink collection with purge, attacker seizure/deletion,
and metric extraction.

One round is one node-attack step per attacker. Wall-clock parameters
convert into sink speed: the sink performs floor(((d/v)+r) / (t_s/n))
scheduled node visits per round. All randomness derives from the run
seed through fixed stream keys, so a report is a pure function of its
configuration.
"""

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import mobility, placement, routing, topology as topo
from .energy import EnergyLedger, RadioProfile
from .errors import ConfigError
from .routing import OverheadLedger

OBJECTIVES = ("seizure", "deletion")
DATA_MODES = ("single", "per_trip")
START_MODES = ("random", "spread")

# rng stream keys (stable: adding attackers or data never shifts others)
_K_HELLO = 5
_K_ORIGIN = 2
_K_PLACEMENT = 1
_K_ATTACKER = 3
_K_KMEANS = 4
_K_START = 6
_K_SINK_PHASE = 7


@dataclass(frozen=True)
class ScenarioConfig:
    # topology
    topology_kind: str = "grid"  # grid | lattice | line | file
    side: int = 10
    nx: int = 0  # lattice only
    ny: int = 0
    count: int = 0  # line only
    spacing: float = 100.0
    tx_range: float = 120.0
    topology_file: str = ""
    delivery_prob: float = 1.0
    # sink
    trip_duration: float = 600.0
    etx_threshold: float = 3.0
    hello_rounds: int = 10
    # attacker
    attackers: int = 1
    attacker_model: str = "manhattan"
    attacker_speed: float = 10.0
    seizure_time: float = 20.0
    attacker_start: str = "random"  # random | spread | node:<id>
    pooled_attackers: bool = True
    # data
    f_k: int = 6
    f_d: int = 3
    placement_strategy: str = "clustered"
    target_dfk: float = -1.0  # fixed_distance only
    dfk_tolerance: float = 0.25
    fragment_cap: int = 1  # 0 disables the per-node cap
    draw_in_origin_cluster: bool = False
    data_mode: str = "single"
    origin_node: int = -1  # fixed data origin; -1 draws a random node
    # routing
    protocol: str = "dsr"
    s_a: int = 2
    s_c: int = 4
    # radio
    e_tx: float = 0.0016
    e_rx: float = 0.0012
    tx_power: float = 1.0
    # run
    objective: str = "seizure"
    max_rounds: int = 200
    seeds: tuple = (0,)
    label: str = ""

    def validate(self):
        """Raise ConfigError naming the violated invariant; return a list
        of non-fatal warnings."""
        warnings = []
        if self.topology_kind not in ("grid", "lattice", "line", "file"):
            raise ConfigError(f"unknown topology_kind {self.topology_kind!r}")
        if self.topology_kind == "grid" and self.side < 2:
            raise ConfigError("grid side must be >= 2")
        if self.topology_kind == "lattice" and (self.nx < 1 or self.ny < 1):
            raise ConfigError("lattice nx and ny must be >= 1")
        if self.topology_kind == "line" and self.count < 1:
            raise ConfigError("line count must be >= 1")
        if self.topology_kind == "file" and not self.topology_file:
            raise ConfigError("topology_kind=file requires topology_file")
        if self.topology_kind != "file":
            if self.spacing <= 0 or self.tx_range <= 0:
                raise ConfigError("spacing and tx_range must be positive")
        if not 0 < self.delivery_prob <= 1:
            raise ConfigError("delivery_prob must be in (0, 1]")
        if self.trip_duration <= 0:
            raise ConfigError("trip_duration (t_s) must be positive")
        if self.hello_rounds < 1:
            raise ConfigError("hello_rounds must be >= 1")
        if self.attackers < 1:
            raise ConfigError("attackers must be >= 1")
        if self.attacker_model not in mobility.ATTACKER_MODELS:
            raise ConfigError(f"unknown attacker_model {self.attacker_model!r}")
        if self.attacker_speed <= 0:
            raise ConfigError("attacker_speed (v) must be positive")
        if self.seizure_time < 0:
            raise ConfigError("seizure_time (r) must be non-negative")
        if not (
            self.attacker_start in START_MODES or self.attacker_start.startswith("node:")
        ):
            raise ConfigError(f"unknown attacker_start {self.attacker_start!r}")
        if not 1 <= self.f_d <= self.f_k:
            raise ConfigError(f"need 1 <= f_d <= f_k, got f_d={self.f_d}, f_k={self.f_k}")
        if self.placement_strategy not in placement.STRATEGIES:
            raise ConfigError(f"unknown placement strategy {self.placement_strategy!r}")
        if self.placement_strategy == "fixed_distance" and self.target_dfk < 0:
            raise ConfigError("fixed_distance placement requires target_dfk >= 0")
        if self.fragment_cap < 0:
            raise ConfigError("fragment_cap must be >= 0 (0 disables the cap)")
        cap = self.effective_cap()
        if cap > self.f_d - 1:
            warnings.append(
                f"fragment_cap {cap} exceeds f_d-1={self.f_d - 1}: a stationary "
                "attacker can decode from a single node"
            )
        if self.protocol not in routing.PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}")
        if self.data_mode not in DATA_MODES:
            raise ConfigError(f"unknown data_mode {self.data_mode!r}")
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be >= 1")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        RadioProfile(self.e_tx, self.e_rx, self.tx_power)  # validates
        return warnings

    def effective_cap(self):
        return self.f_k if self.fragment_cap == 0 else self.fragment_cap

    def canonical_items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


def build_topology(config):
    if config.topology_kind == "grid":
        return topo.generate_grid(
            config.side, config.spacing, config.tx_range, config.delivery_prob
        )
    if config.topology_kind == "lattice":
        return topo.generate_lattice(
            config.nx, config.ny, config.spacing, config.tx_range, config.delivery_prob
        )
    if config.topology_kind == "line":
        return topo.generate_line(
            config.count, config.spacing, config.tx_range, config.delivery_prob
        )
    return topo.load_topology(
        config.topology_file, default_tx_range=config.tx_range or None,
        delivery_prob=config.delivery_prob,
    )


@dataclass
class PreparedScenario:
    """Per-config state shared across seeds (immutable once built)."""

    config: ScenarioConfig
    topology: object
    trajectory: object
    observations: dict
    shared_graph: object  # None when links are lossy (graph differs by seed)
    round_cost: float
    visits_per_round: int


def prepare(config):
    config.validate()
    network = build_topology(config)
    trajectory = mobility.plan_sink_trip(network, config.trip_duration)
    observations = topo.collect_sink_observations(
        network, trajectory.waypoints, trajectory.reception_range
    )
    shared_graph = None
    if config.delivery_prob >= 1.0:
        hello = topo.simulate_hello_rounds(network, 0, config.hello_rounds)
        shared_graph = topo.build_sink_graph(
            network, hello, observations, config.etx_threshold
        )
    spacing = network.spacing
    if spacing is None:
        dists = []
        for nid, node in network.nodes.items():
            best = min(
                math.dist(node.position, other.position)
                for oid, other in network.nodes.items()
                if oid != nid
            )
            dists.append(best)
        spacing = sum(dists) / len(dists)
    round_cost = spacing / config.attacker_speed + config.seizure_time
    visits_per_round = int(round_cost // (config.trip_duration / len(network)))
    return PreparedScenario(
        config, network, trajectory, observations, shared_graph, round_cost,
        visits_per_round,
    )


def _stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + [int(k) for k in key]))


def attacker_success_check(pools, thresholds, available, objective="seizure", pooled=True):
    """Success events over the data registry.

    Seizure succeeds on a datum once the attackers hold f_d distinct
    fragment indices of it (pooled across attackers by default); deletion
    succeeds once fewer than f_d fragments remain available to the sink
    (already collected or still stored in the network).
    """
    events = []
    for datum in sorted(thresholds):
        need = thresholds[datum]
        if objective == "seizure":
            if pooled:
                got = set()
                for pool in pools:
                    got |= pool.get(datum, set())
                if len(got) >= need:
                    events.append((datum, "seized"))
            elif any(len(p.get(datum, set())) >= need for p in pools):
                events.append((datum, "seized"))
        elif len(available[datum]) < need:
            events.append((datum, "destroyed"))
    return events


def _start_nodes(config, prepared, seed):
    rng = _stream(seed, _K_START)
    ids = sorted(prepared.topology.nodes)
    starts = []
    if config.attacker_start.startswith("node:"):
        nid = int(config.attacker_start.split(":", 1)[1])
        return [(nid, 1)] * config.attackers
    if config.attacker_start == "spread" and config.attacker_model in (
        "line_sweep",
        "circular_sweep",
    ):
        order = (
            mobility._line_axis_order(prepared.topology)
            if config.attacker_model == "line_sweep"
            else mobility._circular_order(prepared.topology)
        )
        for i in range(config.attackers):
            pos = (i * len(order)) // config.attackers
            if config.attacker_model == "line_sweep":
                pos = 0 if i % 2 == 0 else len(order) - 1
            starts.append((order[pos], 1 if i % 2 == 0 else -1))
        return starts
    for _i in range(config.attackers):
        starts.append((int(ids[int(rng.integers(len(ids)))]), 1))
    return starts


@dataclass
class RunResult:
    seed: int
    outcome: str  # seized | destroyed | safe
    round_of_compromise: int | None
    rounds_run: int
    dfk_hops: list
    dfk_meters: list
    energy: EnergyLedger
    overhead: OverheadLedger
    holes: int
    placement_violations: int
    events: list = field(default_factory=list)


class _Run:
    def __init__(self, prepared, seed):
        self.p = prepared
        self.c = prepared.config
        self.seed = seed
        self.graph = prepared.shared_graph
        if self.graph is None:
            hello = topo.simulate_hello_rounds(
                prepared.topology, _stream(seed, _K_HELLO).integers(2**32), self.c.hello_rounds
            )
            self.graph = topo.build_sink_graph(
                prepared.topology, hello, prepared.observations, self.c.etx_threshold
            )
        self.profile = RadioProfile(self.c.e_tx, self.c.e_rx, self.c.tx_power)
        self.energy = EnergyLedger()
        self.overhead = OverheadLedger(self.c.protocol, s_a=self.c.s_a, s_c=self.c.s_c)
        self.events = []
        self.holes = 0
        self.placement_violations = 0
        self.node_store = {nid: set() for nid in prepared.topology.nodes}
        self.holders = {}  # datum -> {frag -> node or None}
        self.f_d = {}  # datum -> threshold
        self.sink_pool = {}  # datum -> set of fragment indices
        self.pools = []  # per attacker: datum -> set of fragment indices
        self.dfk_hops = []
        self.dfk_meters = []
        self.next_datum = 0
        self.clustering = None
        if self.c.placement_strategy == "clustered":
            k = self.c.f_k - 1 if self.c.draw_in_origin_cluster else self.c.f_k
            self.clustering = placement.kmeans_cluster(
                self.graph, k, _stream(seed, _K_KMEANS)
            )

    def log(self, rnd, event, actor, node=-1, datum=-1, frag=-1):
        self.events.append((rnd, event, actor, node, datum, frag))

    def spawn_datum(self, rnd):
        datum = self.next_datum
        self.next_datum += 1
        if self.c.origin_node >= 0:
            origin = self.c.origin_node
        else:
            origin_rng = _stream(self.seed, _K_ORIGIN, datum)
            origin = int(self.graph.node_ids[int(origin_rng.integers(len(self.graph.node_ids)))])
        data = placement.DataItem(datum, origin, self.c.f_k, self.c.f_d)
        rng = _stream(self.seed, _K_PLACEMENT, datum)
        strategy = self.c.placement_strategy
        if strategy == "near_first":
            plan = placement.place_near_first(data, self.graph, rng)
        elif strategy == "far_first":
            plan = placement.place_far_first(data, self.graph, rng)
        elif strategy == "random":
            plan = placement.place_random(data, self.graph, rng)
        elif strategy == "fixed_distance":
            plan = placement.place_fixed_distance(
                data,
                self.graph,
                self.c.target_dfk,
                rng,
                tolerance=self.c.dfk_tolerance,
                max_per_node=self.c.effective_cap(),
            )
        else:
            plan = placement.place_clustered(
                data,
                self.graph,
                self.clustering,
                rng,
                draw_in_origin_cluster=self.c.draw_in_origin_cluster,
            )
        if plan.neighbor_violation:
            self.placement_violations += 1
        cap = self.c.effective_cap()
        counts = {}
        for node in plan.holders():
            counts[node] = counts.get(node, 0) + 1
        assert max(counts.values()) <= cap, "placement exceeded per-node cap"
        destinations = sorted({n for n in plan.holders() if n != origin})
        result, holes = routing.routes_for_protocol(
            self.graph, self.c.protocol, origin, destinations,
            s_a=self.c.s_a, s_c=self.c.s_c,
        )
        self.holes += holes
        self.overhead.merge(result.ledger)
        self.holders[datum] = {}
        self.f_d[datum] = self.c.f_d
        self.sink_pool[datum] = set()
        self.log(rnd, "datum_created", "engine", origin, datum)
        for frag in sorted(plan.assignments):
            node = plan.assignments[frag]
            self.holders[datum][frag] = node
            self.node_store[node].add((datum, frag))
            self.log(rnd, "fragment_placed", "engine", node, datum, frag)
            if node != origin:
                route = result.routes.get(node)
                if route is not None:
                    self.energy.charge_fragment(route, self.profile, datum)
        self.dfk_hops.append(plan.dfk_hops)
        self.dfk_meters.append(plan.dfk_meters)

    def attacker_success(self):
        """(datum, kind) for the first compromised datum, else None."""
        available = {
            datum: self.sink_pool[datum]
            | {f for f, node in self.holders[datum].items() if node is not None}
            for datum in self.holders
        }
        events = attacker_success_check(
            self.pools, self.f_d, available, self.c.objective, self.c.pooled_attackers
        )
        return events[0] if events else None

    def all_data_settled(self):
        """True when no datum can still be attacked successfully."""
        for datum in sorted(self.holders):
            need = self.f_d[datum]
            remaining = {f for f, n in self.holders[datum].items() if n is not None}
            if self.c.objective == "seizure":
                pooled = set()
                for pool in self.pools:
                    pooled |= pool.get(datum, set())
                if len(pooled | remaining) >= need:
                    return False
            else:
                # destructible only while the sink is short of f_d and
                # fragments remain erasable in the network
                if len(self.sink_pool[datum]) < need and remaining:
                    return False
        return True

    def run(self):
        c = self.c
        trajectory = self.p.trajectory
        order = trajectory.order
        n = len(order)
        starts = _start_nodes(c, self.p, self.seed)
        attackers = []
        rngs = []
        for i, (start, direction) in enumerate(starts):
            attackers.append(
                mobility.make_attacker(
                    self.p.topology, i, c.attacker_model, c.attacker_speed,
                    c.seizure_time, start, direction,
                )
            )
            rngs.append(_stream(self.seed, _K_ATTACKER, i))
            self.pools.append({})
        # the trip phase relative to attack onset is arbitrary in the wild
        visit_ptr = int(_stream(self.seed, _K_SINK_PHASE).integers(n))
        visits_done = 0
        spawn_pending = True
        outcome = "safe"
        compromise_round = None
        rnd = 0
        self.energy.charge_hello(self.p.topology, c.hello_rounds, self.profile)
        for rnd in range(1, c.max_rounds + 1):
            if spawn_pending:
                self.spawn_datum(rnd)
                spawn_pending = False
            # The sink's scheduled visits for this round complete before the
            # attacker's travel-plus-seizure cycle does, so they land first;
            # an attack finishing at the round boundary loses the tie.
            for _ in range(self.p.visits_per_round):
                node = order[visit_ptr]
                visit_ptr = (visit_ptr + 1) % n
                visits_done += 1
                self.log(rnd, "sink_visit", "sink", node)
                for datum, frag in sorted(self.node_store[node]):
                    self.sink_pool[datum].add(frag)
                    self.holders[datum][frag] = None
                    self.log(rnd, "sink_collect", "sink", node, datum, frag)
                    if len(self.sink_pool[datum]) == self.f_d[datum]:
                        self.log(rnd, "sink_decode", "sink", node, datum)
                self.node_store[node].clear()
                if visits_done % n == 0:
                    self.energy.charge_table_distribution(order, self.profile)
                    self.energy.charge_hello(self.p.topology, c.hello_rounds, self.profile)
                    if c.data_mode == "per_trip":
                        spawn_pending = True
            for i, attacker in enumerate(attackers):
                node = mobility.attacker_step(attacker, self.p.topology, rngs[i])
                self.log(rnd, "attack", f"attacker{i}", node)
                store = self.node_store[node]
                if c.objective == "seizure":
                    for datum, frag in sorted(store):
                        self.pools[i].setdefault(datum, set()).add(frag)
                        self.log(rnd, "seize", f"attacker{i}", node, datum, frag)
                else:
                    for datum, frag in sorted(store):
                        self.holders[datum][frag] = None
                        self.log(rnd, "erase", f"attacker{i}", node, datum, frag)
                    store.clear()
            hit = self.attacker_success()
            if hit is not None:
                datum, outcome = hit
                compromise_round = rnd
                self.log(rnd, "attacker_success", "engine", -1, datum)
                break
            if c.data_mode == "single" and self.all_data_settled():
                break
        return RunResult(
            seed=self.seed,
            outcome=outcome,
            round_of_compromise=compromise_round,
            rounds_run=rnd,
            dfk_hops=self.dfk_hops,
            dfk_meters=self.dfk_meters,
            energy=self.energy,
            overhead=self.overhead,
            holes=self.holes,
            placement_violations=self.placement_violations,
            events=self.events,
        )


def run_single(config, seed, prepared=None):
    """One deterministic run; identical (config, seed) gives an identical
    RunResult."""
    if prepared is None:
        prepared = prepare(config)
    return _Run(prepared, seed).run()


@dataclass
class SimulationReport:
    config: ScenarioConfig
    seeds: tuple
    seizure_percentage: float
    rounds_to_compromise: list  # per-seed, None where the attack failed
    zero_attack_rounds: int
    mean_dfk_hops: float
    mean_dfk_meters: float
    energy: EnergyLedger
    overhead: OverheadLedger
    holes: int
    placement_violations: int
    warnings: list
    results: list = field(default_factory=list)

    def success_curve(self, max_rounds=None):
        """Cumulative attack-success percentage per round budget."""
        limit = max_rounds or self.config.max_rounds
        total = len(self.seeds)
        curve = []
        for budget in range(1, limit + 1):
            wins = sum(
                1 for r in self.rounds_to_compromise if r is not None and r <= budget
            )
            curve.append((budget, 100.0 * wins / total))
        return curve


def run_scenario(config, prepared=None, keep_events=False):
    """Run every seed of the config and aggregate; pure in (config, seeds)."""
    if prepared is None:
        prepared = prepare(config)
    warnings = config.validate()
    results = []
    for seed in config.seeds:
        res = run_single(config, seed, prepared)
        if not keep_events:
            res.events = []
        results.append(res)
    wins = [r for r in results if r.outcome in ("seized", "destroyed")]
    rounds = [r.round_of_compromise for r in results]
    finite = [r for r in rounds if r is not None]
    zero_rounds = (min(finite) - 1) if finite else config.max_rounds
    all_hops = [h for r in results for h in r.dfk_hops]
    all_m = [m for r in results for m in r.dfk_meters]
    energy = EnergyLedger()
    overhead = OverheadLedger(config.protocol, s_a=config.s_a, s_c=config.s_c)
    for r in results:
        energy.merge(r.energy)
        overhead.merge(r.overhead)
    return SimulationReport(
        config=config,
        seeds=tuple(config.seeds),
        seizure_percentage=100.0 * len(wins) / len(results),
        rounds_to_compromise=rounds,
        zero_attack_rounds=zero_rounds,
        mean_dfk_hops=(sum(all_hops) / len(all_hops)) if all_hops else 0.0,
        mean_dfk_meters=(sum(all_m) / len(all_m)) if all_m else 0.0,
        energy=energy,
        overhead=overhead,
        holes=sum(r.holes for r in results),
        placement_violations=sum(r.placement_violations for r in results),
        warnings=warnings,
        results=results,
    )


def sweep(configs, jobs=1):
    """Run independent scenario cells, optionally in parallel processes.

    Per-cell errors are captured and returned in place of the report so
    one bad cell cannot abort the sweep."""
    if jobs <= 1:
        return [_run_cell(config) for config in configs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_cell, configs))


def _run_cell(config):
    try:
        return run_scenario(config)
    except Exception as exc:  # noqa: BLE001 - reported per cell
        return exc


def variant(config, **overrides):
    """Copy of config with fields replaced (seeds stays a tuple)."""
    if "seeds" in overrides:
        overrides["seeds"] = tuple(overrides["seeds"])
    return replace(config, **overrides)
