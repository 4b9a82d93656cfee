"""Command-line front end.

Subcommands: run, sweep, preset, topo, routes, validate. Exit codes:
0 on success, 1 on runtime failure, 2 on invalid configuration. Output
CSVs land in --out (or $UWSNSIM_OUT, default ./results) together with a
metadata.json recording config hashes, seeds and code version.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__, presets, report, routing, scenario, topology
from .engine import prepare, run_scenario, run_single, sweep, variant
from .errors import ConfigError, SimulationError


def _outdir(args):
    path = args.out or os.environ.get("UWSNSIM_OUT") or "results"
    os.makedirs(path, exist_ok=True)
    return path


def _build_topology_from_args(args):
    if args.topology_file:
        return topology.load_topology(args.topology_file, default_tx_range=args.tx_range)
    if args.kind == "grid":
        return topology.generate_grid(args.side, args.spacing, args.tx_range)
    if args.kind == "lattice":
        return topology.generate_lattice(args.nx, args.ny, args.spacing, args.tx_range)
    if args.kind == "line":
        return topology.generate_line(args.count, args.spacing, args.tx_range)
    raise ConfigError(f"unknown topology kind {args.kind!r}")


def cmd_run(args):
    config = scenario.load_scenario(args.scenario)
    if args.seed is not None:
        config = variant(config, seeds=(args.seed,))
    outdir = _outdir(args)
    rep = run_scenario(config)
    report.emit_summary([rep], os.path.join(outdir, "summary.csv"))
    written = ["summary.csv"]
    if args.events:
        prepared = prepare(config)
        result = run_single(config, config.seeds[0], prepared)
        report.emit_events(result, os.path.join(outdir, "events.csv"))
        written.append("events.csv")
    report.write_metadata(
        outdir,
        [{"config_hash": report.config_hash(config), "seeds": list(config.seeds),
          "scenario": os.path.basename(str(args.scenario)), "files": written}],
        notes=rep.warnings,
    )
    print(report.human_summary([rep]))
    return 0


def cmd_validate(args):
    config = scenario.load_scenario(args.scenario)
    config.validate()
    print(f"ok: {report.config_hash(config)}")
    return 0


def cmd_preset(args):
    if args.list:
        for name in sorted(presets.PRESETS):
            print(name)
        return 0
    if not args.name:
        raise ConfigError("preset name required (or --list)")
    outdir = _outdir(args)
    files, notes = presets.run_preset(args.name, seeds=args.seeds, jobs=args.jobs)
    entries = []
    for filename, (header, rows) in sorted(files.items()):
        path = os.path.join(outdir, filename)
        report.write_csv(path, header, rows)
        entries.append({"file": filename, "rows": len(rows), "preset": args.name,
                        "seeds": args.seeds})
        print(f"wrote {path} ({len(rows)} rows)")
    report.write_metadata(outdir, entries, notes=notes)
    return 0


def cmd_topo(args):
    net = _build_topology_from_args(args)
    graph = topology.NetworkGraph.from_topology(net)
    outdir = _outdir(args)
    nodes_path = os.path.join(outdir, "nodes.csv")
    edges_path = os.path.join(outdir, "edges.csv")
    with open(nodes_path, "w", encoding="utf-8") as fh:
        fh.write(topology.dump_nodes_csv(graph))
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write(topology.dump_edges_csv(graph))
    print(f"wrote {nodes_path} ({len(graph)} nodes), {edges_path}")
    return 0


def cmd_routes(args):
    net = _build_topology_from_args(args)
    graph = topology.NetworkGraph.from_topology(net)
    rng = np.random.default_rng(args.seed)
    ids = graph.node_ids
    origins = [args.origin] if args.origin is not None else ids
    route_rows = []
    ledgers = []
    for origin in origins:
        others = [n for n in ids if n != origin]
        dests = [int(x) for x in rng.choice(others, size=args.fk - 1, replace=False)]
        result, holes = routing.routes_for_protocol(graph, args.protocol, origin, dests)
        ledgers.append(result.ledger)
        for dest in sorted(result.routes):
            route = result.routes[dest]
            route_rows.append(
                [origin, dest, route.hop_count, route.total_etx,
                 "-".join(str(n) for n in route.hop_sequence), holes]
            )
    outdir = _outdir(args)
    routes_path = os.path.join(outdir, "routes.csv")
    report.write_csv(
        routes_path,
        ["origin", "destination", "hops", "total_etx", "sequence", "hole_fallbacks"],
        route_rows,
    )
    merged = ledgers[0]
    for lg in ledgers[1:]:
        merged.merge(lg)
    ledger_path = os.path.join(outdir, "ledger.csv")
    report.emit_ledgers([merged], ledger_path)
    print(f"wrote {routes_path} ({len(route_rows)} routes), {ledger_path}")
    return 0


def cmd_sweep(args):
    base = scenario.load_scenario(args.scenario)
    configs = [base]
    for spec in args.vary or []:
        key, _, values = spec.partition("=")
        if not values:
            raise ConfigError(f"--vary needs key=v1,v2,... got {spec!r}")
        field = key.strip()
        if not hasattr(base, field):
            raise ConfigError(f"unknown config field {field!r}")
        kind = type(getattr(base, field))
        parsed = [kind(v) for v in values.split(",")]
        configs = [
            variant(c, **{field: v, "label": f"{c.label or 'sweep'}-{field}{v}"})
            for c in configs
            for v in parsed
        ]
    outdir = _outdir(args)
    reports = sweep(configs, jobs=args.jobs)
    good = [r for r in reports if not isinstance(r, Exception)]
    bad = [(c, r) for c, r in zip(configs, reports) if isinstance(r, Exception)]
    report.emit_summary(good, os.path.join(outdir, "sweep.csv"))
    report.write_metadata(
        outdir,
        [{"config_hash": report.config_hash(c), "label": c.label, "seeds": list(c.seeds)}
         for c in configs],
        notes=[f"cell {c.label}: {exc}" for c, exc in bad],
    )
    print(report.human_summary(good))
    for config, exc in bad:
        print(f"cell {config.label} failed: {exc}", file=sys.stderr)
    return 1 if bad else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uwsnsim",
        description="Fragment-dispersal simulator for unattended sensor networks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=None, help="override: run only this seed")
    p_run.add_argument("--events", action="store_true", help="also dump the first seed's event log")
    p_run.set_defaults(fn=cmd_run)

    p_val = sub.add_parser("validate", help="check a scenario file without running")
    p_val.add_argument("scenario")
    p_val.set_defaults(fn=cmd_validate)

    p_pre = sub.add_parser("preset", help="run a figure-style experiment preset")
    p_pre.add_argument("name", nargs="?")
    p_pre.add_argument("--list", action="store_true")
    p_pre.add_argument("--out", default=None)
    p_pre.add_argument("--seeds", type=int, default=None, help="number of seeds per cell")
    p_pre.add_argument("--jobs", type=int, default=1)
    p_pre.set_defaults(fn=cmd_preset)

    def topo_args(p):
        p.add_argument("--kind", default="grid", choices=["grid", "lattice", "line"])
        p.add_argument("--side", type=int, default=10)
        p.add_argument("--nx", type=int, default=10)
        p.add_argument("--ny", type=int, default=5)
        p.add_argument("--count", type=int, default=50)
        p.add_argument("--spacing", type=float, default=100.0)
        p.add_argument("--tx-range", dest="tx_range", type=float, default=120.0)
        p.add_argument("--topology-file", default=None)
        p.add_argument("--out", default=None)

    p_topo = sub.add_parser("topo", help="generate or load a topology; dump node/edge CSVs")
    topo_args(p_topo)
    p_topo.set_defaults(fn=cmd_topo)

    p_routes = sub.add_parser("routes", help="dump routing artifacts for a topology")
    topo_args(p_routes)
    p_routes.add_argument("--protocol", default="dsr", choices=list(routing.PROTOCOLS))
    p_routes.add_argument("--origin", type=int, default=None, help="default: all origins")
    p_routes.add_argument("--fk", type=int, default=6)
    p_routes.add_argument("--seed", type=int, default=0)
    p_routes.set_defaults(fn=cmd_routes)

    p_sweep = sub.add_parser("sweep", help="cartesian parameter sweep over a scenario file")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--vary", action="append", metavar="key=v1,v2,...")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(fn=cmd_sweep)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
