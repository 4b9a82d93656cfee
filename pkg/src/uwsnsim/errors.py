"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class TopologyError(SimulationError):
    pass


class DuplicateNodeIdError(TopologyError):
    def __init__(self, node_id):
        super().__init__(f"duplicate node id {node_id}")
        self.node_id = node_id


class MalformedRecordError(TopologyError):
    def __init__(self, line_no, line, reason):
        super().__init__(f"line {line_no}: {reason}: {line!r}")
        self.line_no = line_no


class EmptyTopologyError(TopologyError):
    def __init__(self):
        super().__init__("topology contains no nodes")


class IncompleteGraphError(TopologyError):
    """Sink never observed one or more nodes during its trip."""

    def __init__(self, missing_ids):
        self.missing_ids = sorted(missing_ids)
        super().__init__(f"nodes never observed by sink: {self.missing_ids}")


class PlacementInfeasibleError(SimulationError):
    pass


class TargetUnreachableError(SimulationError):
    """Fixed-distance placement could not reach the requested spread."""

    def __init__(self, target, best):
        self.target = target
        self.best = best
        super().__init__(
            f"no placement within tolerance of target {target}; best achieved {best:.3f}"
        )


class UnreachableError(SimulationError):
    def __init__(self, a, b):
        self.pair = (a, b)
        super().__init__(f"no path between nodes {a} and {b}")


class MissingCoordinateError(SimulationError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"no coordinate estimate for node {node_id}")


class ConfigError(SimulationError):
    """Scenario configuration violates an invariant; message names it."""
