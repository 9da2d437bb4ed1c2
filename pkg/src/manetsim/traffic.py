"""CBR flows and the delay / jitter / throughput metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import US_PER_S, to_us


@dataclass(frozen=True)
class CbrFlow:
    src: int
    dst: int
    rate: float = 4.0          # packets per second
    payload: int = 512         # bytes
    start: float = 15.0        # s
    end: float = 295.0         # s

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("flow rate must be > 0")
        if self.payload <= 0:
            raise ValueError("flow payload must be > 0")
        if not self.start < self.end:
            raise ValueError(f"flow start {self.start} must precede end {self.end}")
        if self.src == self.dst:
            raise ValueError("flow source and destination must differ")

    @property
    def interval_us(self) -> int:
        return to_us(1.0 / self.rate)


def generate(flow: CbrFlow) -> list:
    """Send instants in microseconds, exactly 1/rate apart, end exclusive."""
    start, end, step = to_us(flow.start), to_us(flow.end), flow.interval_us
    return list(range(start, end, step))


@dataclass(frozen=True)
class DeliverySample:
    seq: int
    send_time: float
    recv_time: float

    @property
    def delay(self) -> float:
        return self.recv_time - self.send_time


def end_to_end_delay(samples) -> float | None:
    """Mean delay in seconds; None when nothing was delivered."""
    if not samples:
        return None
    return math.fsum(s.recv_time - s.send_time for s in samples) / len(samples)


def avg_jitter(samples) -> float | None:
    """Mean |delay(i) - delay(i-1)| over consecutive received packets in seq order."""
    if len(samples) < 2:
        return None
    ordered = sorted(samples, key=lambda s: s.seq)
    delays = [s.recv_time - s.send_time for s in ordered]
    return math.fsum(abs(b - a) for a, b in zip(delays, delays[1:])) / (len(delays) - 1)


def throughput(samples, flow: CbrFlow) -> float:
    """Delivered payload bits over the span from flow start to the later of
    the last reception and the flow end (so it never exceeds the offered load)."""
    if not samples:
        return 0.0
    last = max(max(s.recv_time for s in samples), flow.end)
    span = last - flow.start
    if span <= 0:
        return 0.0
    return len(samples) * flow.payload * 8 / span


def control_overhead(counters: dict) -> int:
    keys = ("beacon_tx", "role_change_tx", "rreq_tx", "rrep_tx", "rerr_tx")
    return sum(int(counters.get(k, 0)) for k in keys)


@dataclass
class FlowStats:
    """Per-flow bookkeeping; every sent packet ends delivered, dropped or in flight."""

    flow: CbrFlow
    sent: int = 0
    samples: list = field(default_factory=list)
    drops: dict = field(default_factory=dict)
    duplicates: int = 0
    _seen: set = field(default_factory=set, repr=False)

    def on_send(self):
        self.sent += 1

    def on_deliver(self, seq, send_us, recv_us) -> bool:
        if seq in self._seen:
            self.duplicates += 1
            return False
        self._seen.add(seq)
        self.samples.append(DeliverySample(seq, send_us / US_PER_S, recv_us / US_PER_S))
        return True

    def on_drop(self, reason):
        self.drops[reason] = self.drops.get(reason, 0) + 1

    @property
    def delivered(self) -> int:
        return len(self.samples)

    @property
    def dropped(self) -> int:
        return sum(self.drops.values())
