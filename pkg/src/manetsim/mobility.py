"""Random waypoint mobility over a rectangular terrain.

Trajectories are generated up front from each node's own stream, so the
motion of every node is independent of MAC and routing activity.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .engine import RngStream

MIN_EFFECTIVE_SPEED = 0.1


@dataclass(frozen=True)
class Terrain:
    width: float = 1500.0
    height: float = 1500.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"terrain must have positive area, got {self.width}x{self.height}")

    def contains(self, p, eps=1e-9) -> bool:
        return -eps <= p[0] <= self.width + eps and -eps <= p[1] <= self.height + eps


@dataclass(frozen=True)
class MotionLeg:
    origin: tuple
    waypoint: tuple
    speed: float
    depart_time: float

    @property
    def length(self) -> float:
        return math.dist(self.origin, self.waypoint)

    @property
    def arrive_time(self) -> float:
        return self.depart_time + self.length / self.speed

    def position(self, t: float) -> tuple:
        if t <= self.depart_time:
            return self.origin
        d = self.length
        travelled = self.speed * (t - self.depart_time)
        if travelled >= d:
            return self.waypoint
        f = travelled / d
        (x0, y0), (x1, y1) = self.origin, self.waypoint
        return (x0 + (x1 - x0) * f, y0 + (y1 - y0) * f)


def init_placement(node_count: int, terrain: Terrain, rng: RngStream) -> list:
    if node_count < 1:
        raise ValueError("node_count must be >= 1")
    return [(rng.uniform(0.0, terrain.width), rng.uniform(0.0, terrain.height))
            for _ in range(node_count)]


def effective_speed_range(speed_min: float, speed_max: float) -> tuple:
    lo = max(speed_min, MIN_EFFECTIVE_SPEED)
    if speed_max < lo:
        raise ValueError(f"speed_max {speed_max} below effective minimum {lo}")
    return lo, speed_max


def next_leg(at, t: float, rng: RngStream, terrain: Terrain,
             speed_min: float = 0.0, speed_max: float = 10.0, pause_time: float = 0.0) -> MotionLeg:
    lo, hi = effective_speed_range(speed_min, speed_max)
    waypoint = (rng.uniform(0.0, terrain.width), rng.uniform(0.0, terrain.height))
    speed = rng.uniform(lo, hi)
    return MotionLeg(tuple(at), waypoint, speed, t + pause_time)


class Trajectory:
    """Piecewise-linear path of one node: stationary until ``start``, then legs."""

    __slots__ = ("initial", "legs", "_departs", "_cursor")

    def __init__(self, initial, legs):
        self.initial = tuple(initial)
        self.legs = list(legs)
        self._departs = [leg.depart_time for leg in self.legs]
        self._cursor = 0

    def position_at(self, t: float) -> tuple:
        i = bisect.bisect_right(self._departs, t) - 1
        if i < 0:
            return self.initial if not self.legs else self.legs[0].origin
        return self.legs[i].position(t)

    def waypoint_times(self) -> list:
        return [leg.arrive_time for leg in self.legs]


class RandomWaypoint:
    """Random waypoint model for a set of nodes (ids 1..n)."""

    def __init__(self, node_count: int, terrain: Terrain, streams, *,
                 speed_min=0.0, speed_max=10.0, pause_time=0.0, start_time=10.0, end_time=300.0):
        self.terrain = terrain
        self.speed_min, self.speed_max = speed_min, speed_max
        self.pause_time = pause_time
        self.start_time = start_time
        self.end_time = end_time
        effective_speed_range(speed_min, speed_max)
        placement = init_placement(node_count, terrain, streams["placement"])
        self.trajectories = {}
        for i, p in enumerate(placement, start=1):
            self.trajectories[i] = self._build(p, streams["mobility"].child(i))
        # flattened current-leg cache used by the hot path
        self._cur = {}
        for i in self.trajectories:
            self._set_leg(i, 0)

    def _build(self, origin, rng) -> Trajectory:
        legs = []
        t, at = self.start_time, origin
        while t < self.end_time:
            leg = next_leg(at, t, rng, self.terrain, self.speed_min, self.speed_max, self.pause_time)
            legs.append(leg)
            t, at = leg.arrive_time, leg.waypoint
        return Trajectory(origin, legs)

    def _set_leg(self, node, idx):
        tr = self.trajectories[node]
        if idx >= len(tr.legs):
            x, y = tr.legs[-1].waypoint if tr.legs else tr.initial
            self._cur[node] = (math.inf, math.inf, x, y, 0.0, 0.0, x, y)
            return
        leg = tr.legs[idx]
        (x0, y0), (x1, y1) = leg.origin, leg.waypoint
        d = leg.length
        vx = (x1 - x0) / d * leg.speed if d > 0 else 0.0
        vy = (y1 - y0) / d * leg.speed if d > 0 else 0.0
        self._cur[node] = (leg.depart_time, leg.arrive_time, x0, y0, vx, vy, x1, y1)

    def advance(self, node, leg_index):
        """Switch the fast-path cache to ``leg_index`` (called at waypoint events)."""
        self._set_leg(node, leg_index)

    def position_at(self, node, t: float) -> tuple:
        return self.trajectories[node].position_at(t)

    def positions_now(self, t: float) -> dict:
        """Positions of all nodes at ``t``, valid while the leg cache is current."""
        out = {}
        for n, (t0, t1, x0, y0, vx, vy, x1, y1) in self._cur.items():
            if t <= t0:
                out[n] = (x0, y0)
            elif t >= t1:
                out[n] = (x1, y1)
            else:
                dt = t - t0
                out[n] = (x0 + vx * dt, y0 + vy * dt)
        return out
