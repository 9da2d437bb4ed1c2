"""Simplified IEEE 802.11 DCF.

Carrier sense, slotted binary exponential backoff with freezing, no RTS/CTS.
Acknowledgements are abstract: a unicast frame that decodes at its next hop
is acknowledged instantly and without airtime. Any temporal overlap of two
audible frames corrupts both at that receiver (no capture), and a node
cannot receive while it transmits.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, fields

from .packets import BROADCAST
from .radio import airtime_us


@dataclass(frozen=True)
class MacParams:
    slot_us: int = 20
    difs_us: int = 50
    cw_min: int = 31
    cw_max: int = 1023
    retry_limit: int = 7
    ack_timeout_us: int = 1000
    queue_capacity: int = 50


@dataclass
class MacCounters:
    tx_attempts: int = 0
    delivered: int = 0
    collisions: int = 0
    drops_retry: int = 0
    drops_queue: int = 0
    enqueued: int = 0
    broadcasts: int = 0

    @property
    def drops(self) -> int:
        return self.drops_retry + self.drops_queue

    def as_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["drops"] = self.drops
        return d


class Transmission:
    __slots__ = ("sender", "frame", "start", "end", "receivers", "corrupted")

    def __init__(self, sender, frame, start, end, receivers):
        self.sender = sender
        self.frame = frame
        self.start = start
        self.end = end
        self.receivers = receivers   # [(node, prop_us), ...]
        self.corrupted = set()


class Medium:
    """Shared channel: owns every node's MAC and resolves overlaps."""

    def __init__(self, sim, channel, bitrate, params: MacParams, rng, listener):
        self.sim = sim
        self.channel = channel
        self.bitrate = bitrate
        self.params = params
        self.rng = rng
        self.listener = listener  # node-layer callbacks, see Network
        self.macs: dict = {}
        self.in_transit: list = []  # decoded frames awaiting their delivery event

    def add(self, node_id) -> "Mac":
        mac = self.macs[node_id] = Mac(node_id, self)
        return mac

    def start(self, mac: "Mac", frame, now: int):
        end = now + airtime_us(frame.size, self.bitrate)
        receivers = self.channel.receivers_with_delay(mac.node, now / 1e6)
        tx = Transmission(mac.node, frame, now, end, receivers)
        macs = self.macs
        for r, _ in receivers:
            m = macs[r]
            rx = m.rx
            if rx:
                live = [o for o in rx if o.end > now]
                if live:
                    tx.corrupted.add(r)
                    for o in live:
                        o.corrupted.add(r)
                m.rx = rx = live
            if m.on_air_until > now:
                tx.corrupted.add(r)
            rx.append(tx)
            if m.busy_until <= now:
                m.sense_start = now
            if end > m.busy_until:
                m.busy_until = end
            m.freeze(now)
        # half duplex: anything the sender was receiving is lost
        for o in mac.rx:
            if o.end > now:
                o.corrupted.add(mac.node)
        mac.on_air_until = end
        self.sim.schedule(end, "tx-end", mac.node, self.finish, tx)
        self.listener.on_transmit(mac.node, frame)

    def finish(self, tx: Transmission):
        now = self.sim.now
        macs = self.macs
        groups = {}
        for r, prop in tx.receivers:
            m = macs[r]
            try:
                m.rx.remove(tx)
            except ValueError:
                pass
            if m.busy_until == now:
                m.on_idle(now)
            if r not in tx.corrupted:
                groups.setdefault(prop, []).append(r)
        frame = tx.frame
        for prop in sorted(groups):
            entry = (frame, groups[prop])
            self.in_transit.append(entry)
            self.sim.schedule(now + prop, "frame-delivery", tx.sender, self._deliver, entry)
        sender = macs[tx.sender]
        if frame.dst == BROADCAST:
            if tx.corrupted:
                sender.counters.collisions += 1
            sender.tx_done(now, ok=True)
            return
        heard = any(r == frame.dst for r, _ in tx.receivers)
        if heard and frame.dst in tx.corrupted:
            sender.counters.collisions += 1
        if heard and frame.dst not in tx.corrupted:
            sender.tx_done(now, ok=True)
        else:
            sender.await_ack(now)

    def _deliver(self, entry):
        self.in_transit.remove(entry)
        frame, nodes = entry
        for r in nodes:
            if frame.dst == BROADCAST or frame.dst == r:
                self.listener.on_receive(r, frame)

    def in_flight_frames(self):
        """Frames queued (the one on air included) or decoded at their next hop
        but not yet handed up."""
        for m in self.macs.values():
            yield from m.queue
        for frame, nodes in self.in_transit:
            if frame.dst in nodes:
                yield frame


class Mac:
    __slots__ = ("node", "medium", "queue", "cw", "retry", "bo_slots", "bo_start", "bo_event",
                 "busy_until", "sense_start", "on_air_until", "tx_active", "ack_event", "rx", "counters")

    def __init__(self, node, medium: Medium):
        self.node = node
        self.medium = medium
        self.queue = deque()
        self.cw = medium.params.cw_min
        self.retry = 0
        self.bo_slots = -1      # remaining backoff slots, -1 when none pending
        self.bo_start = -1      # when the countdown (re)started, -1 while frozen
        self.bo_event = None
        self.busy_until = 0     # end of the latest transmission sensed
        self.sense_start = -1
        self.on_air_until = 0
        self.tx_active = False  # transmitting or waiting for an ack
        self.ack_event = None
        self.rx = []
        self.counters = MacCounters()

    # -- queue -------------------------------------------------------------
    def enqueue(self, frame) -> bool:
        p = self.medium.params
        if len(self.queue) >= p.queue_capacity:
            self.counters.drops_queue += 1
            self.medium.listener.on_mac_drop(self.node, frame, "queue")
            return False
        self.counters.enqueued += 1
        self.queue.append(frame)
        self.kick(self.medium.sim.now)
        return True

    def remove_where(self, pred) -> list:
        """Pull queued frames matching ``pred`` (the head is kept if in service)."""
        keep, out = deque(), []
        for i, f in enumerate(self.queue):
            if pred(f) and not (i == 0 and self.tx_active):
                out.append(f)
            else:
                keep.append(f)
        self.queue = keep
        return out

    # -- channel access ----------------------------------------------------
    def _draw(self):
        self.bo_slots = self.medium.rng.integer(0, self.cw)

    def _begin_countdown(self, now):
        """Start counting the pending backoff if the medium allows it."""
        if self.busy_until > now:
            self.bo_start = -1
        else:
            idle_from = max(self.busy_until, self.on_air_until)
            self.bo_start = max(now, idle_from + self.medium.params.difs_us)

    def kick(self, now):
        if self.tx_active or not self.queue:
            return
        p = self.medium.params
        if self.bo_slots < 0:
            if max(self.busy_until, self.on_air_until) + p.difs_us <= now:
                self._transmit(now)
                return
            self._draw()
            self._begin_countdown(now)
        if self.bo_start < 0:
            return  # frozen; on_idle resumes
        expiry = self.bo_start + self.bo_slots * p.slot_us
        if expiry <= now:
            self.bo_slots = -1
            self._transmit(now)
        elif self.bo_event is None:
            self.bo_event = self.medium.sim.schedule(expiry, "backoff-expiry", self.node, self._expire)

    def _expire(self):
        self.bo_event = None
        self.bo_slots = -1
        self.bo_start = -1
        if self.queue and not self.tx_active:
            self._transmit(self.medium.sim.now)

    def freeze(self, now):
        """Medium became (or stays) busy at ``now``."""
        if self.bo_slots < 0 or self.bo_start < 0:
            return
        p = self.medium.params
        expiry = self.bo_start + self.bo_slots * p.slot_us
        if expiry < now or (expiry == now and self.bo_event is None):
            self.bo_slots = -1  # countdown already complete
            self.bo_start = -1
            return
        if expiry == now:
            return  # fires this instant: simultaneous start, collides
        if now > self.bo_start:
            self.bo_slots -= (now - self.bo_start) // p.slot_us
        self.bo_start = -1
        if self.bo_event is not None:
            self.medium.sim.cancel(self.bo_event)
            self.bo_event = None

    def on_idle(self, now):
        if self.tx_active:
            return
        if self.bo_slots >= 0 and self.bo_start < 0:
            self.bo_start = now + self.medium.params.difs_us
        self.kick(now)

    # -- transmit / outcome ------------------------------------------------
    def _transmit(self, now):
        self.tx_active = True
        self.counters.tx_attempts += 1
        self.medium.start(self, self.queue[0], now)

    def _post_backoff(self, now):
        self._draw()
        self._begin_countdown(now)

    def tx_done(self, now, ok: bool):
        frame = self.queue.popleft()
        if frame.dst == BROADCAST:
            self.counters.broadcasts += 1
        else:
            self.counters.delivered += 1
        self.tx_active = False
        self.retry = 0
        self.cw = self.medium.params.cw_min
        self._post_backoff(now)
        self.kick(now)

    def await_ack(self, now):
        self.ack_event = self.medium.sim.schedule(
            now + self.medium.params.ack_timeout_us, "ack-timeout", self.node, self.on_ack_timeout)

    def on_ack_timeout(self):
        self.ack_event = None
        now = self.medium.sim.now
        p = self.medium.params
        self.tx_active = False
        if self.retry < p.retry_limit:
            self.retry += 1
            self.cw = min((self.cw + 1) * 2 - 1, p.cw_max)
            self._draw()
            self._begin_countdown(now)
            self.kick(now)
            return "retry"
        frame = self.queue.popleft()
        self.counters.drops_retry += 1
        self.retry = 0
        self.cw = p.cw_min
        self._post_backoff(now)
        self.medium.listener.on_mac_drop(self.node, frame, "retry")
        self.medium.listener.on_link_failure(self.node, frame)
        self.kick(now)
        return "drop"
