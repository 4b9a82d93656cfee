import pytest

from uwsnsim import engine
from uwsnsim.engine import ScenarioConfig, attacker_success_check, prepare, run_single, run_scenario, variant
from uwsnsim.errors import ConfigError


def table1(**overrides):
    overrides.setdefault("seeds", tuple(range(10)))
    return ScenarioConfig(**overrides)


class TestConfigValidation:
    def test_fd_above_fk_names_invariant(self):
        with pytest.raises(ConfigError, match="f_d"):
            table1(f_d=7).validate()

    def test_unknown_strategy(self):
        with pytest.raises(ConfigError, match="placement"):
            table1(placement_strategy="scatter").validate()

    def test_cap_above_decode_threshold_warns(self):
        warnings = table1(fragment_cap=0).validate()
        assert any("stationary" in w for w in warnings)

    def test_bad_times(self):
        with pytest.raises(ConfigError):
            table1(trip_duration=0.0).validate()
        with pytest.raises(ConfigError):
            table1(attacker_speed=0.0).validate()

    def test_fixed_distance_needs_target(self):
        with pytest.raises(ConfigError, match="target_dfk"):
            table1(placement_strategy="fixed_distance").validate()


class TestSuccessCheck:
    def test_pooled_attackers_combine_fragments(self):
        pools = [{0: {1, 2}}, {0: {3}}]
        events = attacker_success_check(pools, {0: 3}, {0: set(range(6))})
        assert events == [(0, "seized")]

    def test_unpooled_requires_single_attacker(self):
        pools = [{0: {1, 2}}, {0: {3}}]
        events = attacker_success_check(pools, {0: 3}, {0: set(range(6))}, pooled=False)
        assert events == []

    def test_duplicate_fragment_indices_do_not_count(self):
        pools = [{0: {1}}, {0: {1}}]
        events = attacker_success_check(pools, {0: 2}, {0: set(range(6))})
        assert events == []

    def test_threshold_one_any_seizure_wins(self):
        events = attacker_success_check([{0: {4}}], {0: 1}, {0: set(range(6))})
        assert events == [(0, "seized")]

    def test_deletion_success_when_sink_cannot_decode(self):
        events = attacker_success_check(
            [{}], {0: 3}, {0: {1, 2}}, objective="deletion"
        )
        assert events == [(0, "destroyed")]


class TestEngineExamples:
    def test_colocated_hoard_falls_in_round_one(self):
        # per-node cap disabled, all fragments at one node, attacker parked
        # on it; slow sink (zero visits per round) cannot interfere
        config = table1(
            seeds=(0,),
            fragment_cap=0,
            placement_strategy="fixed_distance",
            target_dfk=0.0,
            origin_node=55,
            attacker_model="stationary",
            attacker_start="node:55",
            trip_duration=60000.0,
        )
        result = run_single(config, 0)
        assert result.outcome == "seized"
        assert result.round_of_compromise == 1

    def test_deletion_needs_two_erasures_at_fd_five(self):
        config = table1(
            seeds=(3,),
            objective="deletion",
            f_k=6,
            f_d=5,
            placement_strategy="random",
            trip_duration=60000.0,  # sink effectively absent
        )
        prepared = prepare(config)
        result = engine._Run(prepared, 3).run()
        assert result.outcome == "destroyed"
        erased = [e for e in result.events if e[1] == "erase"]
        assert len(erased) == 2

    def test_purged_fragments_never_seized_later(self):
        config = table1(seeds=(1,), placement_strategy="near_first", data_mode="per_trip", max_rounds=60)
        prepared = prepare(config)
        result = engine._Run(prepared, 1).run()
        collected = set()
        for event in result.events:
            _rnd, kind, _actor, _node, datum, frag = event
            if kind == "sink_collect":
                collected.add((datum, frag))
            if kind == "seize":
                assert (datum, frag) not in collected

    def test_fragment_cap_respected(self):
        config = table1(seeds=(0, 1, 2), placement_strategy="random")
        prepared = prepare(config)
        for seed in config.seeds:
            result = engine._Run(prepared, seed).run()
            per_node = {}
            for event in result.events:
                if event[1] == "fragment_placed":
                    key = (event[3], event[4])
                    per_node[key] = per_node.get(key, 0) + 1
            assert max(per_node.values()) <= 1


class TestEngineProperties:
    def test_more_attackers_never_slower(self):
        base = table1(seeds=tuple(range(40)), placement_strategy="near_first")
        rep1 = run_scenario(base)
        rep2 = run_scenario(variant(base, attackers=2))
        for r1, r2 in zip(rep1.rounds_to_compromise, rep2.rounds_to_compromise):
            if r1 is not None:
                assert r2 is not None and r2 <= r1

    def test_compromise_takes_at_least_fd_rounds(self):
        rep = run_scenario(table1(seeds=tuple(range(60)), placement_strategy="near_first"))
        for rounds in rep.rounds_to_compromise:
            if rounds is not None:
                assert rounds >= 3

    def test_deterministic_reports(self):
        config = table1(seeds=tuple(range(5)), placement_strategy="clustered")
        rep_a = run_scenario(config, keep_events=True)
        rep_b = run_scenario(config, keep_events=True)
        assert rep_a.seizure_percentage == rep_b.seizure_percentage
        assert rep_a.rounds_to_compromise == rep_b.rounds_to_compromise
        for ra, rb in zip(rep_a.results, rep_b.results):
            assert ra.events == rb.events

    def test_seizure_deletion_duality_exact_per_seed(self):
        seeds = tuple(range(100))
        base = dict(
            topology_kind="line", count=50, spacing=100.0, tx_range=320.0,
            attacker_model="line_sweep", attacker_start="spread",
            placement_strategy="clustered", f_k=6, seeds=seeds, max_rounds=50,
        )
        seizure = run_scenario(ScenarioConfig(objective="seizure", f_d=5, **base))
        deletion = run_scenario(ScenarioConfig(objective="deletion", f_d=2, **base))
        assert seizure.rounds_to_compromise == deletion.rounds_to_compromise

    def test_single_mode_stops_when_settled(self):
        rep = run_scenario(table1(seeds=(0,), placement_strategy="random", max_rounds=500))
        assert rep.results[0].rounds_run < 500

    def test_lossy_links_still_run(self):
        config = table1(
            seeds=(0, 1), delivery_prob=0.9, hello_rounds=50, placement_strategy="random"
        )
        rep = run_scenario(config)
        assert rep.mean_dfk_hops > 0


class TestSweep:
    def test_sweep_collects_errors_without_aborting(self):
        good = table1(seeds=(0,))
        bad = variant(good, placement_strategy="fixed_distance", target_dfk=50.0)
        reports = engine.sweep([good, bad])
        assert not isinstance(reports[0], Exception)
        assert isinstance(reports[1], Exception)

    def test_parallel_matches_serial(self):
        configs = [table1(seeds=(0, 1), placement_strategy=s) for s in ("random", "near_first")]
        serial = engine.sweep(configs, jobs=1)
        parallel = engine.sweep(configs, jobs=2)
        for a, b in zip(serial, parallel):
            assert a.seizure_percentage == b.seizure_percentage
            assert a.rounds_to_compromise == b.rounds_to_compromise
