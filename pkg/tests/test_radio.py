import math

import pytest
from hypothesis import given, settings, strategies as st

from manetsim.engine import Streams
from manetsim.mobility import RandomWaypoint, Terrain
from manetsim.packets import DATA, Frame
from manetsim.radio import GraphChannel, RadioParams, UnitDiskChannel, airtime, airtime_us


class Fixed:
    """Mobility stand-in with static positions."""

    def __init__(self, pos):
        self.trajectories = {n: None for n in pos}
        self.pos = pos

    def position_at(self, n, t):
        return self.pos[n]

    def positions_now(self, t):
        return dict(self.pos)


def test_collinear_range():
    ch = UnitDiskChannel(Fixed({1: (0, 0), 2: (200, 0), 3: (400, 0)}), RadioParams())
    assert ch.in_range(1, 2, 0) and ch.in_range(2, 3, 0)
    assert not ch.in_range(1, 3, 0)
    assert ch.receivers_of(2, 0) == {1, 3}


def test_range_boundary_inclusive():
    ch = UnitDiskChannel(Fixed({1: (0, 0), 2: (250, 0), 3: (250.001, 0)}), RadioParams())
    assert ch.in_range(1, 2, 0)
    assert not ch.in_range(1, 3, 0)


def test_in_range_needs_distinct_nodes():
    ch = UnitDiskChannel(Fixed({1: (0, 0), 2: (1, 0)}), RadioParams())
    with pytest.raises(ValueError):
        ch.in_range(1, 1, 0)


def test_propagation_delay_rounds_up():
    ch = UnitDiskChannel(Fixed({1: (0, 0), 2: (240, 0), 3: (0, 0.5)}), RadioParams())
    assert dict(ch.receivers_with_delay(1, 0)) == {2: 1, 3: 1}


def test_airtime_values():
    assert airtime(512) == pytest.approx(2.048e-3)
    assert airtime(Frame(DATA, 1, 2, 570, None)) == pytest.approx(2.28e-3)
    assert airtime_us(570, 2e6) == 2280
    assert airtime_us(1, 2e6) == 4
    with pytest.raises(ValueError):
        airtime(0)


@given(st.integers(1, 5000), st.integers(1, 5000))
def test_airtime_monotone(a, b):
    if a <= b:
        assert airtime(a) <= airtime(b)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 1000), st.floats(0, 300))
def test_adjacency_symmetric_and_matches_distance(seed, t):
    m = RandomWaypoint(12, Terrain(600, 600), Streams(seed), start_time=0.0, end_time=301.0)
    ch = UnitDiskChannel(m, RadioParams())
    # bring the fast cache to time t
    for n, tr in m.trajectories.items():
        idx = max(i for i, leg in enumerate(tr.legs) if leg.depart_time <= t) if tr.legs else 0
        m.advance(n, idx)
    adj = ch.adjacency(t)
    for a in adj:
        for b in adj:
            if a < b:
                close = math.dist(m.position_at(a, t), m.position_at(b, t)) <= 250 + 1e-9
                assert (b in adj[a]) == (a in adj[b])
                if abs(math.dist(m.position_at(a, t), m.position_at(b, t)) - 250) > 1e-6:
                    assert (b in adj[a]) == close


def test_graph_channel_symmetrises():
    ch = GraphChannel({1: {2}, 2: set(), 3: set()})
    assert ch.in_range(2, 1)
    assert ch.receivers_of(3) == set()
    assert ch.nodes == [1, 2, 3]
