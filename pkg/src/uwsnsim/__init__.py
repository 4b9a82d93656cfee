"""Deterministic simulator and routing library for fragment dispersal in
unattended wireless sensor networks."""

__version__ = "0.1.0"

from .energy import EnergyLedger, RadioProfile, datum_energy, fragment_energy
from .engine import (
    ScenarioConfig,
    SimulationReport,
    attacker_success_check,
    run_scenario,
    run_single,
    sweep,
)
from .errors import ConfigError, SimulationError
from .mobility import AttackerState, SinkTrajectory, advance_attacker, plan_sink_trip
from .placement import (
    Clustering,
    DataItem,
    PlacementPlan,
    compute_dfk,
    kmeans_cluster,
    place_clustered,
    place_far_first,
    place_fixed_distance,
    place_near_first,
    place_random,
)
from .routing import (
    CoordTable,
    NextHopTable,
    OverheadLedger,
    SourceRoute,
    aodv_tables,
    distributed_overhead_model,
    dsr_routes,
    gpsr_forward,
    gpsr_route,
    gpsr_tables,
    resolve_gpsr_hole,
    shortest_etx_oracle,
)
from .topology import (
    NetworkGraph,
    SensorNode,
    Topology,
    build_sink_graph,
    collect_sink_observations,
    generate_grid,
    generate_lattice,
    generate_line,
    load_topology,
    simulate_hello_rounds,
)

__all__ = [name for name in dir() if not name.startswith("_")]
