"""Unit-disk propagation and frame airtime."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import US_PER_S


@dataclass(frozen=True)
class RadioParams:
    tx_range: float = 250.0
    propagation_speed: float = 3.0e8
    bitrate: float = 2.0e6

    def __post_init__(self):
        if self.tx_range <= 0:
            raise ValueError("tx_range must be > 0")
        if self.bitrate <= 0:
            raise ValueError("bitrate must be > 0")


def airtime_us(size_bytes: int, bitrate: float) -> int:
    """On-air duration in whole microseconds (rounded up)."""
    if size_bytes <= 0:
        raise ValueError("frame size must be > 0")
    return math.ceil(size_bytes * 8 * US_PER_S / bitrate)


def airtime(frame, params: RadioParams = RadioParams()) -> float:
    """Airtime in seconds of a frame (anything with ``size``) or a byte count."""
    size = frame if isinstance(frame, int) else frame.size
    if size <= 0:
        raise ValueError("frame size must be > 0")
    return size * 8 / params.bitrate


class UnitDiskChannel:
    """Links exist iff the Euclidean distance at time t is within tx_range."""

    def __init__(self, mobility, params: RadioParams):
        self.mobility = mobility
        self.params = params
        self._r2 = params.tx_range ** 2
        self._m_per_us = params.propagation_speed / US_PER_S
        self.nodes = sorted(mobility.trajectories)

    def in_range(self, a, b, t: float) -> bool:
        if a == b:
            raise ValueError("in_range needs two distinct nodes")
        pa = self.mobility.position_at(a, t)
        pb = self.mobility.position_at(b, t)
        return (pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2 <= self._r2

    def receivers_of(self, sender, t: float) -> set:
        return {n for n, _ in self.receivers_with_delay(sender, t)}

    def receivers_with_delay(self, sender, t: float) -> list:
        """``[(node, propagation_delay_us), ...]`` for every node in range of sender."""
        pos = self.mobility.positions_now(t)
        sx, sy = pos[sender]
        r2 = self._r2
        mpu = self._m_per_us
        out = []
        for n, (x, y) in pos.items():
            if n == sender:
                continue
            d2 = (x - sx) * (x - sx) + (y - sy) * (y - sy)
            if d2 <= r2:
                out.append((n, math.ceil(math.sqrt(d2) / mpu)))
        return out

    def adjacency(self, t: float) -> dict:
        pos = self.mobility.positions_now(t)
        r2 = self._r2
        adj = {n: set() for n in pos}
        items = sorted(pos.items())
        for i, (a, (ax, ay)) in enumerate(items):
            for b, (bx, by) in items[i + 1:]:
                if (ax - bx) ** 2 + (ay - by) ** 2 <= r2:
                    adj[a].add(b)
                    adj[b].add(a)
        return adj


class GraphChannel:
    """Fixed abstract topology; every link has the same propagation delay."""

    def __init__(self, adjacency: dict, delay_us: int = 1):
        self.adj = {n: set(v) for n, v in adjacency.items()}
        for a, nbrs in list(self.adj.items()):
            for b in nbrs:
                self.adj.setdefault(b, set()).add(a)
        self.nodes = sorted(self.adj)
        self.delay_us = delay_us

    def in_range(self, a, b, t: float = 0.0) -> bool:
        if a == b:
            raise ValueError("in_range needs two distinct nodes")
        return b in self.adj[a]

    def receivers_of(self, sender, t: float = 0.0) -> set:
        return set(self.adj[sender])

    def receivers_with_delay(self, sender, t: float) -> list:
        return [(n, self.delay_us) for n in sorted(self.adj[sender])]

    def adjacency(self, t: float = 0.0) -> dict:
        return {n: set(v) for n, v in self.adj.items()}
