import io
import json
import os

import pytest

from uwsnsim import cli, report, scenario
from uwsnsim.engine import ScenarioConfig
from uwsnsim.errors import ConfigError

GOOD_SCN = """\
[topology]
kind = grid
side = 6
spacing = 100
tx_range = 120

[data]
placement = near_first

[run]
seeds = 0..9
label = smoke
"""

BAD_SCN = """\
[topology]
kind = grid
side = 6

[data]
fragments = 6
decode_threshold = 7
"""


@pytest.fixture
def scn_file(tmp_path):
    path = tmp_path / "good.scn"
    path.write_text(GOOD_SCN)
    return str(path)


class TestScenarioParsing:
    def test_roundtrip(self):
        config = scenario.load_scenario(io.StringIO(GOOD_SCN))
        assert config.side == 6
        assert config.seeds == tuple(range(10))
        text = scenario.format_scenario(config)
        again = scenario.load_scenario(io.StringIO(text))
        assert again == config

    def test_seed_lists(self):
        assert scenario.parse_seeds("3..5") == (3, 4, 5)
        assert scenario.parse_seeds("1, 5, 9") == (1, 5, 9)
        with pytest.raises(ConfigError):
            scenario.parse_seeds("9..3")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown scenario key"):
            scenario.load_scenario(io.StringIO("[run]\nfrobnicate = 1\n"))

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError, match="f_d"):
            scenario.load_scenario(io.StringIO(BAD_SCN))


class TestCliCommands:
    def test_validate_ok(self, scn_file, capsys):
        assert cli.main(["validate", scn_file]) == 0
        assert "ok:" in capsys.readouterr().out

    def test_validate_bad_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.scn"
        path.write_text(BAD_SCN)
        assert cli.main(["validate", str(path)]) == 2
        err = capsys.readouterr().err
        assert "f_d" in err  # names the violated invariant

    def test_missing_file_exit_2(self, tmp_path):
        assert cli.main(["validate", str(tmp_path / "nope.scn")]) == 2

    def test_run_twice_byte_identical(self, scn_file, tmp_path, capsys):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert cli.main(["run", scn_file, "--out", str(out_a), "--events"]) == 0
        assert cli.main(["run", scn_file, "--out", str(out_b), "--events"]) == 0
        for name in ("summary.csv", "events.csv", "metadata.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_run_seed_override(self, scn_file, tmp_path):
        out = tmp_path / "c"
        assert cli.main(["run", scn_file, "--out", str(out), "--seed", "7"]) == 0
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["runs"][0]["seeds"] == [7]

    def test_topo_dump(self, tmp_path):
        out = tmp_path / "t"
        assert cli.main(["topo", "--kind", "grid", "--side", "4", "--out", str(out)]) == 0
        nodes = (out / "nodes.csv").read_text().splitlines()
        assert nodes[0] == "node_id,x_est,y_est"
        assert len(nodes) == 17

    def test_routes_dump(self, tmp_path):
        out = tmp_path / "r"
        code = cli.main(
            ["routes", "--kind", "grid", "--side", "5", "--protocol", "gpsr",
             "--origin", "0", "--out", str(out)]
        )
        assert code == 0
        lines = (out / "routes.csv").read_text().splitlines()
        assert lines[0] == "origin,destination,hops,total_etx,sequence,hole_fallbacks"
        assert len(lines) == 6  # five destinations for f_k=6
        ledger = (out / "ledger.csv").read_text().splitlines()
        assert ledger[0] == "protocol,instructions,control_msgs,header_bytes_total,table_bytes_max"
        assert ledger[1].startswith("gpsr,5,0,")

    def test_sweep_vary(self, scn_file, tmp_path):
        out = tmp_path / "s"
        code = cli.main(
            ["sweep", scn_file, "--vary", "trip_duration=300,600", "--out", str(out)]
        )
        assert code == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert len(lines) == 3

    def test_preset_list(self, capsys):
        assert cli.main(["preset", "--list"]) == 0
        names = capsys.readouterr().out.split()
        assert "fig1a" in names and "fig5c" in names

    def test_preset_unknown_exit_2(self, tmp_path):
        assert cli.main(["preset", "nope", "--out", str(tmp_path)]) == 2

    def test_preset_fig5c_schema(self, tmp_path, capsys):
        out = tmp_path / "p"
        assert cli.main(["preset", "fig5c", "--out", str(out)]) == 0
        lines = (out / "fig5c.csv").read_text().splitlines()
        assert lines[0] == "site,protocol,kind,count"
        assert any(line.startswith("line50,centralized_aodv,route_request,0") for line in lines)
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["version"]

    def test_preset_fig1f_schema(self, tmp_path):
        out = tmp_path / "f"
        assert cli.main(["preset", "fig1f", "--seeds", "10", "--out", str(out)]) == 0
        lines = (out / "fig1f.csv").read_text().splitlines()
        assert lines[0] == "target_dfk,mean_ek,stddev"
        assert len(lines) == 5


class TestReportHelpers:
    def test_config_hash_stable_and_sensitive(self):
        a = ScenarioConfig()
        b = ScenarioConfig()
        c = ScenarioConfig(f_d=2)
        assert report.config_hash(a) == report.config_hash(b)
        assert report.config_hash(a) != report.config_hash(c)

    def test_float_format_stable(self):
        assert report.fmt(1.0) == "1"
        assert report.fmt(0.30000000000000004) == "0.3"
        assert report.fmt(12) == "12"
