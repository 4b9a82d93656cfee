"""Scenario file parsing: INI-style sections with # comments.

Example:

    [topology]
    kind = grid
    side = 10
    spacing = 100
    tx_range = 120

    [attacker]
    count = 1
    model = manhattan

    [run]
    seeds = 0..199
"""

import configparser

from .engine import ScenarioConfig
from .errors import ConfigError

_SCHEMA = {
    # section, key -> (config field, converter)
    ("topology", "kind"): ("topology_kind", str),
    ("topology", "side"): ("side", int),
    ("topology", "nx"): ("nx", int),
    ("topology", "ny"): ("ny", int),
    ("topology", "count"): ("count", int),
    ("topology", "spacing"): ("spacing", float),
    ("topology", "tx_range"): ("tx_range", float),
    ("topology", "file"): ("topology_file", str),
    ("topology", "delivery_prob"): ("delivery_prob", float),
    ("sink", "trip_duration"): ("trip_duration", float),
    ("sink", "etx_threshold"): ("etx_threshold", float),
    ("sink", "hello_rounds"): ("hello_rounds", int),
    ("attacker", "count"): ("attackers", int),
    ("attacker", "model"): ("attacker_model", str),
    ("attacker", "speed"): ("attacker_speed", float),
    ("attacker", "seizure_time"): ("seizure_time", float),
    ("attacker", "start"): ("attacker_start", str),
    ("attacker", "pooled"): ("pooled_attackers", None),  # bool, handled below
    ("data", "fragments"): ("f_k", int),
    ("data", "decode_threshold"): ("f_d", int),
    ("data", "placement"): ("placement_strategy", str),
    ("data", "target_dfk"): ("target_dfk", float),
    ("data", "dfk_tolerance"): ("dfk_tolerance", float),
    ("data", "cap"): ("fragment_cap", int),
    ("data", "draw_in_origin_cluster"): ("draw_in_origin_cluster", None),
    ("data", "mode"): ("data_mode", str),
    ("data", "origin_node"): ("origin_node", int),
    ("routing", "protocol"): ("protocol", str),
    ("routing", "address_bytes"): ("s_a", int),
    ("routing", "coord_bytes"): ("s_c", int),
    ("radio", "e_tx"): ("e_tx", float),
    ("radio", "e_rx"): ("e_rx", float),
    ("radio", "tx_power"): ("tx_power", float),
    ("run", "objective"): ("objective", str),
    ("run", "max_rounds"): ("max_rounds", int),
    ("run", "seeds"): ("seeds", None),
    ("run", "label"): ("label", str),
}

_BOOL_FIELDS = {"pooled_attackers", "draw_in_origin_cluster"}


def parse_seeds(text):
    """'0..199' (inclusive range) or comma-separated integers."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"seed range {text!r} is empty")
        return tuple(range(lo, hi + 1))
    return tuple(int(s) for s in text.replace(",", " ").split())


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def load_scenario(source):
    """Parse a scenario file (path or file object) into a ScenarioConfig."""
    parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    try:
        if hasattr(source, "read"):
            parser.read_file(source)
        else:
            with open(source, encoding="utf-8") as fh:
                parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot parse scenario file: {exc}") from exc
    overrides = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            spec = _SCHEMA.get((section, key))
            if spec is None:
                raise ConfigError(f"unknown scenario key [{section}] {key}")
            field, conv = spec
            if field == "seeds":
                overrides[field] = parse_seeds(raw)
            elif field in _BOOL_FIELDS:
                overrides[field] = _parse_bool(raw)
            else:
                try:
                    overrides[field] = conv(raw)
                except ValueError as exc:
                    raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
    config = ScenarioConfig(**overrides)
    config.validate()
    return config


def format_scenario(config):
    """Render a config back into scenario-file text (round-trips)."""
    by_section = {}
    reverse = {field: (section, key) for (section, key), (field, _c) in _SCHEMA.items()}
    for field, value in config.canonical_items():
        section, key = reverse[field]
        if field == "seeds":
            value = ",".join(str(s) for s in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        by_section.setdefault(section, []).append((key, value))
    lines = []
    for section in ("topology", "sink", "attacker", "data", "routing", "radio", "run"):
        lines.append(f"[{section}]")
        for key, value in by_section.get(section, []):
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
