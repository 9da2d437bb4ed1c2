"""Discrete-event core: integer-microsecond clock, event heap, named RNG streams."""
from __future__ import annotations

import hashlib
import heapq
import random

US_PER_S = 1_000_000

EVENT_KINDS = (
    "mobility-waypoint",
    "frame-delivery",
    "backoff-expiry",
    "beacon-timer",
    "route-timeout",
    "traffic-send",
    "sim-end",
    "tx-end",
    "ack-timeout",
    "forward-jitter",
    "snapshot",
)

GLOBAL = "global"


def to_us(seconds: float) -> int:
    return int(round(seconds * US_PER_S))


def to_s(us: int) -> float:
    return us / US_PER_S


class SchedulingError(RuntimeError):
    """Raised when an event is scheduled before the current clock."""


class Event:
    __slots__ = ("time", "seq", "kind", "target", "fn", "args", "state")

    PENDING, FIRED, CANCELLED = 0, 1, 2

    def __init__(self, time, seq, kind, target, fn, args):
        self.time = time
        self.seq = seq
        self.kind = kind
        self.target = target
        self.fn = fn
        self.args = args
        self.state = Event.PENDING

    @property
    def live(self) -> bool:
        return self.state == Event.PENDING

    def __repr__(self):
        return f"Event({self.time}us #{self.seq} {self.kind} -> {self.target})"


class Simulator:
    """Single-threaded event loop ordered by (fire_time, seq).

    ``trace`` may be any object with a ``write`` method; one line
    ``time_us,seq,kind,target`` is written per processed event.
    """

    def __init__(self, trace=None):
        self.now = 0
        self._heap: list = []
        self._seq = 0
        self._last = (-1, -1)
        self.processed = 0
        self.trace = trace

    def schedule(self, time_us: int, kind: str, target, fn, *args) -> Event:
        if time_us < self.now:
            raise SchedulingError(f"event {kind!r} at {time_us}us is before clock {self.now}us")
        ev = Event(time_us, self._seq, kind, target, fn, args)
        self._seq += 1
        heapq.heappush(self._heap, (time_us, ev.seq, ev))
        return ev

    def schedule_in(self, delay_us: int, kind: str, target, fn, *args) -> Event:
        return self.schedule(self.now + delay_us, kind, target, fn, *args)

    @staticmethod
    def cancel(ev: Event | None) -> bool:
        if ev is None or ev.state != Event.PENDING:
            return False
        ev.state = Event.CANCELLED
        ev.fn = ev.args = None
        return True

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._heap if ev.state == Event.PENDING)

    def run_until(self, t_end_us: int) -> int:
        if t_end_us < self.now:
            raise SchedulingError(f"run_until({t_end_us}) is before clock {self.now}us")
        heap = self._heap
        pop = heapq.heappop
        trace = self.trace
        count = 0
        while heap and heap[0][0] <= t_end_us:
            t, seq, ev = pop(heap)
            if ev.state != Event.PENDING:
                continue
            assert (t, seq) > self._last, "event order violated"
            self._last = (t, seq)
            self.now = t
            ev.state = Event.FIRED
            if trace is not None:
                trace.write(f"{t},{seq},{ev.kind},{ev.target}\n")
            fn, args = ev.fn, ev.args
            ev.fn = ev.args = None
            fn(*args)
            count += 1
        self.now = t_end_us
        self.processed += count
        return count


def derive_seed(master_seed: int, stream_id: str) -> int:
    digest = hashlib.sha256(f"{int(master_seed)}/{stream_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class RngStream:
    """Independent generator for one named purpose (mobility, mac-backoff, ...)."""

    def __init__(self, master_seed: int, stream_id: str):
        self.stream_id = stream_id
        self.master_seed = master_seed
        self._rng = random.Random(derive_seed(master_seed, stream_id))
        self.draws = 0

    def uniform(self, lo: float, hi: float) -> float:
        if lo > hi:
            raise ValueError(f"uniform({lo}, {hi}): lo > hi")
        self.draws += 1
        return lo + (hi - lo) * self._rng.random()

    def integer(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise ValueError(f"integer({lo}, {hi}): lo > hi")
        self.draws += 1
        return self._rng.randint(lo, hi)

    def child(self, suffix) -> "RngStream":
        return RngStream(self.master_seed, f"{self.stream_id}:{suffix}")


class Streams:
    """Lazily created named streams for one run."""

    def __init__(self, master_seed: int):
        self.master_seed = master_seed
        self._streams: dict[str, RngStream] = {}

    def __getitem__(self, stream_id: str) -> RngStream:
        s = self._streams.get(stream_id)
        if s is None:
            s = self._streams[stream_id] = RngStream(self.master_seed, stream_id)
        return s
