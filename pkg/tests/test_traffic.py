import pytest
from hypothesis import given, strategies as st

from manetsim.clustering import CH_G, ClusterParams
from manetsim.aodv import BACKBONE
from manetsim.traffic import (CbrFlow, DeliverySample, FlowStats, avg_jitter, control_overhead,
                              end_to_end_delay, generate, throughput)
from helpers import flow, from_edges, graph_net


def samples(delays_ms, start=0.0, step=0.25):
    return [DeliverySample(i, start + i * step, start + i * step + d / 1000) for i, d in enumerate(delays_ms)]


def test_default_flow_send_times():
    sends = generate(CbrFlow(12, 17))
    assert len(sends) == 1120
    assert sends[:3] == [15_000_000, 15_250_000, 15_500_000]
    assert sends[-1] == 294_750_000
    assert {b - a for a, b in zip(sends, sends[1:])} == {250_000}


def test_single_packet_boundary():
    assert generate(CbrFlow(1, 2, rate=4, start=10.0, end=10.25)) == [10_000_000]


def test_flow_validation():
    for kw in ({"rate": 0}, {"payload": 0}, {"start": 5.0, "end": 5.0}):
        with pytest.raises(ValueError):
            CbrFlow(1, 2, **kw)
    with pytest.raises(ValueError):
        CbrFlow(3, 3)


def test_delay_examples():
    assert end_to_end_delay(samples([10, 10, 10])) == pytest.approx(0.010)
    assert end_to_end_delay(samples([10, 20])) == pytest.approx(0.015)
    assert end_to_end_delay([]) is None


def test_jitter_examples():
    assert avg_jitter(samples([10, 10, 10])) == pytest.approx(0.0, abs=1e-12)
    assert avg_jitter(samples([10, 20, 10])) == pytest.approx(0.010)
    assert avg_jitter(samples([10])) is None
    # losses pair surviving neighbours in seq order
    s = samples([10, 99, 30])
    assert avg_jitter([s[2], s[0]]) == pytest.approx(0.020)


@given(st.floats(0, 5), st.integers(2, 50))
def test_constant_delay_has_zero_jitter(d, n):
    # integer-microsecond clock: delays are whole microseconds
    d_us = round(d * 1e6)
    ss = [DeliverySample(i, (15_000_000 + 250_000 * i) / 1e6, (15_000_000 + 250_000 * i + d_us) / 1e6) for i in range(n)]
    assert avg_jitter(ss) == pytest.approx(0.0, abs=1e-9)


def test_throughput():
    f = CbrFlow(12, 17)
    full = [DeliverySample(i, t / 1e6, t / 1e6 + 0.002) for i, t in enumerate(generate(f))]
    assert throughput(full, f) == pytest.approx(16384)
    late = full[:-1] + [DeliverySample(1119, 294.75, 300.0)]
    assert throughput(late, f) == pytest.approx(1120 * 4096 / 285.0)
    assert throughput(full, f) <= f.rate * f.payload * 8
    assert throughput([], f) == 0


def test_control_overhead_sums_control_kinds():
    c = {"beacon_tx": 10, "role_change_tx": 2, "rreq_tx": 3, "rrep_tx": 1, "rerr_tx": 4, "data_tx": 99}
    assert control_overhead(c) == 20


def test_flow_stats_suppress_duplicates():
    fs = FlowStats(CbrFlow(1, 2))
    assert fs.on_deliver(0, 0, 10)
    assert not fs.on_deliver(0, 0, 20)
    assert fs.delivered == 1 and fs.duplicates == 1


def test_single_hop_delay_within_one_slot():
    # beacons pushed past the end of the run: the data flow is the only sender
    quiet = ClusterParams(beacon_interval=1000.0)
    net = graph_net(from_edges(2, [(1, 2)]), flows=[flow(1, 2, start=5.0, end=15.0)], sim_time=20.0, cluster=quiet)
    rep = net.run()
    assert rep.delivered == rep.sent == 40 and rep.mac_drops == 0
    ideal = (570 * 8 / 2e6) + 1e-6   # airtime + propagation
    first, *rest = sorted(net.flow_stats[0].samples, key=lambda s: s.seq)
    assert first.delay > ideal        # waits for route discovery
    assert all(abs(s.delay - ideal) <= 20e-6 for s in rest)
    assert abs(end_to_end_delay(rest) - ideal) <= 20e-6
    assert avg_jitter(rest) == pytest.approx(0.0, abs=1e-9)


def test_single_hop_with_beacons_only_defers():
    net = graph_net(from_edges(2, [(1, 2)]), flows=[flow(1, 2, start=5.0, end=15.0)], sim_time=20.0)
    net.run()
    delays = [round(s.delay * 1e6) for s in net.flow_stats[0].samples]
    assert min(delays) == 2281
    assert sum(d == 2281 for d in delays) >= 35


def test_ordinary_listener_counts_suppressed_forward():
    # 1 heads {1,2,3}; 3 is a member with no foreign neighbour in 1-2, 1-3, 2-4
    adj = from_edges(4, [(1, 2), (1, 3), (2, 4)])
    net = graph_net(adj, flows=[flow(1, 4, start=8.0, end=9.0)], mode=CH_G, flooding=BACKBONE, sim_time=12.0)
    rep = net.run()
    assert net.clusters[3].kind.value == "Ordinary"
    assert rep.suppressed_forwards > 0
