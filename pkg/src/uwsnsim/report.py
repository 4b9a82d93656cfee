"""CSV emission and run metadata.

Every writer is deterministic: fixed column order, fixed float format,
no timestamps, and a config hash embedded in the metadata file so
re-running the same configuration reproduces identical bytes.
"""

import hashlib
import json
import os

from . import __version__

SUMMARY_COLUMNS = [
    "label",
    "topology",
    "n",
    "strategy",
    "protocol",
    "attackers",
    "f_k",
    "f_d",
    "t_s",
    "objective",
    "seeds",
    "seizure_pct",
    "mean_rounds_to_compromise",
    "zero_attack_rounds",
    "mean_dfk_hops",
    "mean_dfk_meters",
    "hole_fallbacks",
    "placement_violations",
    "energy_fragment_j",
    "energy_hello_j",
    "energy_tables_j",
    "instructions",
    "control_msgs",
    "header_bytes_total",
    "table_bytes_max",
]

LEDGER_COLUMNS = ["protocol", "instructions", "control_msgs", "header_bytes_total", "table_bytes_max"]

EVENT_COLUMNS = ["round", "event_type", "actor", "node", "data_id", "fragment_index"]


def fmt(value):
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def config_hash(config):
    payload = repr(config.canonical_items()).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def topology_label(config):
    if config.topology_kind == "grid":
        return f"grid{config.side}x{config.side}"
    if config.topology_kind == "lattice":
        return f"lattice{config.nx}x{config.ny}"
    if config.topology_kind == "line":
        return f"line{config.count}"
    return os.path.basename(config.topology_file)


def _node_count(config):
    if config.topology_kind == "grid":
        return config.side**2
    if config.topology_kind == "lattice":
        return config.nx * config.ny
    if config.topology_kind == "line":
        return config.count
    return -1


def summary_row(report):
    config = report.config
    finite = [r for r in report.rounds_to_compromise if r is not None]
    mean_rounds = sum(finite) / len(finite) if finite else -1.0
    strategy = config.placement_strategy
    if strategy == "fixed_distance":
        strategy = f"fixed{config.target_dfk:g}"
    return [
        config.label or config_hash(config),
        topology_label(config),
        _node_count(config),
        strategy,
        config.protocol,
        config.attackers,
        config.f_k,
        config.f_d,
        config.trip_duration,
        config.objective,
        len(report.seeds),
        report.seizure_percentage,
        mean_rounds,
        report.zero_attack_rounds,
        report.mean_dfk_hops,
        report.mean_dfk_meters,
        report.holes,
        report.placement_violations,
        report.energy.totals["fragment_transfer"],
        report.energy.totals["hello"],
        report.energy.totals["table_distribution"],
        report.overhead.instructions,
        report.overhead.control_messages,
        report.overhead.header_bytes_total,
        report.overhead.table_bytes_max,
    ]


def emit_summary(reports, path):
    return write_csv(path, SUMMARY_COLUMNS, [summary_row(r) for r in reports])


def emit_ledgers(ledgers, path):
    rows = [
        [lg.protocol, lg.instructions, lg.control_messages, lg.header_bytes_total, lg.table_bytes_max]
        for lg in ledgers
    ]
    return write_csv(path, LEDGER_COLUMNS, rows)


def emit_events(result, path):
    return write_csv(path, EVENT_COLUMNS, result.events)


def write_metadata(outdir, entries, notes=()):
    """metadata.json listing config hashes, seed lists and code version."""
    payload = {
        "version": __version__,
        "runs": entries,
        "notes": list(notes),
    }
    path = os.path.join(outdir, "metadata.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def human_summary(reports):
    lines = []
    header = f"{'label':<24} {'strategy':<12} {'proto':<5} {'seize%':>7} {'dfk':>6} {'rounds0':>7}"
    lines.append(header)
    lines.append("-" * len(header))
    for rep in reports:
        row = summary_row(rep)
        lines.append(
            f"{str(row[0])[:24]:<24} {row[3]:<12} {row[4]:<5} "
            f"{row[11]:>7.2f} {row[14]:>6.2f} {row[13]:>7}"
        )
    return "\n".join(lines)
