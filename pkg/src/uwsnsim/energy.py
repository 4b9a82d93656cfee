"""Per-fragment and per-datum energy accounting.

A fragment traveling h hops costs sum over hops of (e_tx * power + e_rx);
transmit energy lands on the sending node, receive energy on the
receiver. HELLO beaconing and route-table distribution are tracked in
separate categories so the fragment totals stay comparable.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UnreachableError

# Per-packet defaults (joules); implementation defaults, configurable.
DEFAULT_E_TX = 0.0016
DEFAULT_E_RX = 0.0012


@dataclass(frozen=True)
class RadioProfile:
    e_tx: float = DEFAULT_E_TX
    e_rx: float = DEFAULT_E_RX
    tx_power: float = 1.0  # fraction of maximum transmit power, 0..1

    def __post_init__(self):
        if self.e_tx <= 0 or self.e_rx <= 0:
            raise ConfigError("e_tx and e_rx must be positive")
        if not 0 <= self.tx_power <= 1:
            raise ConfigError("tx_power must lie in [0, 1]")


CATEGORIES = ("fragment_transfer", "hello", "table_distribution")


@dataclass
class EnergyLedger:
    per_node: dict = field(default_factory=dict)
    per_datum: dict = field(default_factory=dict)
    totals: dict = field(default_factory=lambda: {c: 0.0 for c in CATEGORIES})

    def _add_node(self, node, joules):
        self.per_node[node] = self.per_node.get(node, 0.0) + joules

    def charge_fragment(self, route, profile, data_id):
        """Charge one fragment transfer along `route`; returns e_f."""
        e_f = 0.0
        for sender, receiver in zip(route.hop_sequence, route.hop_sequence[1:]):
            tx = profile.e_tx * profile.tx_power
            self._add_node(sender, tx)
            self._add_node(receiver, profile.e_rx)
            e_f += tx + profile.e_rx
        self.per_datum[data_id] = self.per_datum.get(data_id, 0.0) + e_f
        self.totals["fragment_transfer"] += e_f
        return e_f

    def charge_hello(self, topology, rounds, profile):
        """One transmission per node per round; one reception per in-range
        listener per round (radios listen regardless of Bernoulli loss)."""
        for node in topology.nodes:
            self._add_node(node, rounds * profile.e_tx * profile.tx_power)
            self.totals["hello"] += rounds * profile.e_tx * profile.tx_power
        for _a, b in topology.links:
            self._add_node(b, rounds * profile.e_rx)
            self.totals["hello"] += rounds * profile.e_rx

    def charge_table_distribution(self, node_ids, profile):
        """Each node receives its route table from the sink once per trip."""
        for node in node_ids:
            self._add_node(node, profile.e_rx)
            self.totals["table_distribution"] += profile.e_rx

    def merge(self, other):
        for k, v in other.per_node.items():
            self.per_node[k] = self.per_node.get(k, 0.0) + v
        for k, v in other.per_datum.items():
            self.per_datum[k] = self.per_datum.get(k, 0.0) + v
        for k, v in other.totals.items():
            self.totals[k] += v
        return self

    def node_total(self):
        return sum(self.per_node.values())


def fragment_energy(route, profile):
    """e_f for one fragment: per-hop transmit (scaled by power fraction)
    plus receive cost; a fragment that stays put costs nothing."""
    h = route.hop_count
    return h * (profile.e_tx * profile.tx_power + profile.e_rx)


def datum_energy(plan, routes, profile):
    """e_k: sum of e_f over the datum's fragments. The origin-resident
    fragment contributes zero; every remote fragment needs its route."""
    origin = plan.assignments[0]
    e_k = 0.0
    for idx in sorted(plan.assignments):
        node = plan.assignments[idx]
        if node == origin:
            continue
        route = routes.get(node)
        if route is None:
            raise UnreachableError(origin, node)
        e_k += fragment_energy(route, profile)
    return e_k


def energy_vs_spread_sweep(graph, targets, profile, seeds, f_k=6, f_d=3, tolerance=0.35):
    """Mean e_k per target hop spread, using fixed-distance placements and
    minimum-ETX routes. Returns rows (target, mean_ek, stddev)."""
    from .placement import DataItem, place_fixed_distance
    from .routing import shortest_etx_oracle

    rows = []
    for t_index, target in enumerate(targets):
        samples = []
        for seed in seeds:
            rng = np.random.default_rng(np.random.SeedSequence([int(seed), 71, t_index]))
            origin = int(graph.node_ids[int(rng.integers(len(graph.node_ids)))])
            data = DataItem(data_id=0, origin=origin, f_k=f_k, f_d=f_d)
            cap = f_k if target < 1 else 1
            plan = place_fixed_distance(
                data, graph, target, rng, tolerance=tolerance, max_per_node=cap
            )
            routes = {}
            for node in set(plan.holders()):
                if node != origin:
                    routes[node] = shortest_etx_oracle(graph, origin, node)
            samples.append(datum_energy(plan, routes, profile))
        arr = np.asarray(samples)
        rows.append((float(target), float(arr.mean()), float(arr.std())))
    return rows
