import pytest

from manetsim.clustering import CH_G, CHG, Role
from manetsim.scenario import (ScenarioConfig, ScenarioError, bundled_scenario, dump_scenario,
                               load_scenario, parse_scenario)


def test_bundled_chg():
    cfg = load_scenario("paper_chg.scn")
    assert cfg.node_count == 30 and cfg.terrain == (1500.0, 1500.0)
    assert (cfg.speed_min, cfg.speed_max, cfg.pause_time, cfg.mobility_start) == (0, 10, 0, 10)
    assert cfg.sim_time == 300 and cfg.mode == CHG and cfg.flooding == "backbone"
    (f,) = cfg.flows
    assert (f.src, f.dst, f.rate, f.payload, f.start, f.end) == (12, 17, 4, 512, 15, 295)
    assert {n: p.role for n, p in cfg.pinned_roles.items()} == {
        15: Role.CLUSTER_HEAD_GATEWAY, 30: Role.CLUSTER_HEAD_GATEWAY}


def test_bundled_files_differ_only_in_mode_and_pins():
    a = bundled_scenario("paper_chgw.scn").file_items()
    b = bundled_scenario("paper_chg.scn").file_items()
    differing = {k for k in set(a) | set(b) if a.get(k) != b.get(k)}
    assert differing and all(k == "mode" or k.startswith("pinned.") for k in differing)
    assert a["mode"] == CH_G and b["mode"] == CHG


def test_node_count_zero():
    with pytest.raises(ScenarioError, match="node_count"):
        parse_scenario("node_count=0\n")


def test_gateway_pin_rejected_in_chg():
    with pytest.raises(ScenarioError, match="pinned.3"):
        parse_scenario("mode=CHG\npinned.3=Gateway\n")


def test_unknown_key_reports_line():
    with pytest.raises(ScenarioError, match=r"x.scn:3: colour: unknown key"):
        parse_scenario("# comment\nnode_count=5\ncolour=blue\n", "x.scn")


def test_duplicate_and_malformed():
    with pytest.raises(ScenarioError, match="duplicate"):
        parse_scenario("sim_time=10\nsim_time=20\n")
    with pytest.raises(ScenarioError, match="key=value"):
        parse_scenario("sim_time 10\n")
    with pytest.raises(ScenarioError, match="float"):
        parse_scenario("sim_time=ten\n")
    with pytest.raises(ScenarioError, match="WIDTHxHEIGHT"):
        parse_scenario("terrain=big\n")


def test_flow_node_out_of_range():
    with pytest.raises(ScenarioError, match="flow.0.dst"):
        parse_scenario("node_count=5\nflow.0.src=1\nflow.0.dst=9\n")


def test_flow_defaults_follow_sim_time():
    cfg = parse_scenario("node_count=5\nsim_time=60\nflow.0.src=1\nflow.0.dst=2\n")
    assert cfg.flows[0].end == 55 and cfg.flows[0].start == 15


def test_missing_file():
    with pytest.raises(ScenarioError, match="not found"):
        load_scenario("/nonexistent/file.scn")


def test_dump_round_trip(tmp_path):
    cfg = bundled_scenario("paper_chgw.scn")
    p = tmp_path / "s.scn"
    p.write_text(dump_scenario(cfg))
    assert load_scenario(p) == cfg


def test_defaults():
    cfg = ScenarioConfig()
    assert cfg.sim_time == 300 and cfg.tx_range == 250 and cfg.node_count == 30
