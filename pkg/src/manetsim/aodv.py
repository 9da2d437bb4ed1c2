"""AODV route discovery and maintenance (RREQ / RREP / RERR).

Flooding can be restricted to the clustering backbone: a node that is not
part of the backbone still learns reverse routes from a RREQ and may answer
it from a fresh route of its own, but never rebroadcasts it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .engine import to_us
from .packets import BROADCAST, DATA, RERR, RREP, RREQ, DataPacket, Frame, Rerr, Rrep, Rreq

FULL = "full"
BACKBONE = "backbone"


@dataclass(frozen=True)
class AodvParams:
    active_route_timeout: float = 3.0
    rreq_retries: int = 2
    node_traversal_time: float = 0.040
    net_diameter: int = 35
    buffer_capacity: int = 64
    rreq_jitter: float = 0.010

    @property
    def path_discovery_time(self) -> float:
        return 2 * self.node_traversal_time * self.net_diameter

    @property
    def my_route_timeout(self) -> float:
        return 2 * self.active_route_timeout


class RouteEntry:
    __slots__ = ("dest", "next_hop", "hop_count", "dest_seq", "lifetime", "valid", "precursors")

    def __init__(self, dest, next_hop, hop_count, dest_seq, lifetime):
        self.dest = dest
        self.next_hop = next_hop
        self.hop_count = hop_count
        self.dest_seq = dest_seq   # None when unknown
        self.lifetime = lifetime   # us
        self.valid = True
        self.precursors = set()

    def usable(self, now) -> bool:
        return self.valid and self.lifetime >= now

    def __repr__(self):
        state = "valid" if self.valid else "invalid"
        return f"Route({self.dest} via {self.next_hop}, {self.hop_count} hops, seq={self.dest_seq}, {state})"


def _newer(a, b) -> bool:
    """Sequence number a strictly newer than b (None is unknown)."""
    if a is None:
        return False
    return b is None or a > b


class AodvAgent:
    def __init__(self, node_id, params: AodvParams, host, flooding=BACKBONE, backbone=lambda: True):
        self.id = node_id
        self.p = params
        self.host = host
        self.flooding = flooding
        self.in_backbone = backbone
        self.seq = 0
        self.rreq_id = 0
        self.routes: dict = {}
        self.seen: dict = {}        # (orig, rreq_id) -> best hop count heard
        self.buffer: dict = {}      # dest -> deque[DataPacket]
        self.discovery: dict = {}   # dest -> [retries, timer]
        self.counters = host.routing_counters
        self._art = to_us(params.active_route_timeout)
        self._pdt = to_us(params.path_discovery_time)
        self._jitter = to_us(params.rreq_jitter)

    # -- route table ---------------------------------------------------------
    def route_lookup(self, dest):
        r = self.routes.get(dest)
        if r is not None and r.usable(self.host.sim.now):
            return r.next_hop
        return None

    def _update(self, dest, next_hop, hops, seq, lifetime) -> RouteEntry:
        r = self.routes.get(dest)
        if r is None:
            r = self.routes[dest] = RouteEntry(dest, next_hop, hops, seq, lifetime)
            return r
        now = self.host.sim.now
        take = (
            _newer(seq, r.dest_seq)
            or r.dest_seq is None
            or (seq == r.dest_seq and (not r.usable(now) or hops < r.hop_count))
        )
        if take:
            r.next_hop, r.hop_count, r.valid = next_hop, hops, True
            if seq is not None:
                r.dest_seq = seq
            r.lifetime = max(r.lifetime, lifetime) if r.next_hop == next_hop else lifetime
        elif r.usable(now) and r.next_hop == next_hop:
            r.lifetime = max(r.lifetime, lifetime)
        return r

    def _neighbor_route(self, nbr):
        self._update(nbr, nbr, 1, None, self.host.sim.now + self._art)

    def _refresh(self, dest):
        r = self.routes.get(dest)
        if r is not None and r.valid:
            r.lifetime = max(r.lifetime, self.host.sim.now + self._art)

    # -- data path -----------------------------------------------------------
    def send_data(self, pkt: DataPacket):
        """Route a data packet originated here or arriving for forwarding."""
        if pkt.dst == self.id:
            self.host.deliver(self.id, pkt)
            return
        nh = self.route_lookup(pkt.dst)
        if nh is not None:
            self._refresh(pkt.dst)
            self._refresh(nh)
            if pkt.src != self.id:
                self._refresh(pkt.src)
            if pkt.hops >= self.p.net_diameter:
                self.host.drop(self.id, pkt, "ttl")
                return
            self.host.send_frame(self.id, Frame(DATA, self.id, nh, pkt.size, pkt))
            return
        if pkt.src == self.id:
            q = self.buffer.setdefault(pkt.dst, deque())
            if len(q) >= self.p.buffer_capacity:
                self.host.drop(self.id, q.popleft(), "buffer")
            q.append(pkt)
            if pkt.dst not in self.discovery:
                self.originate_rreq(pkt.dst)
            return
        self.host.drop(self.id, pkt, "no_route")
        r = self.routes.get(pkt.dst)
        seq = r.dest_seq if r is not None else None
        self._send_rerr([(pkt.dst, seq)])

    def on_data(self, pkt: DataPacket, frm):
        pkt.hops += 1
        self._neighbor_route(frm)
        self._refresh(pkt.src)
        self.send_data(pkt)

    def _flush(self, dest):
        q = self.buffer.pop(dest, None)
        while q:
            self.send_data(q.popleft())

    # -- discovery -----------------------------------------------------------
    def originate_rreq(self, dest):
        state = self.discovery.get(dest)
        if state is None:
            state = self.discovery[dest] = [0, None]
        self.seq += 1
        self.rreq_id += 1
        self.seen[(self.id, self.rreq_id)] = 0
        r = self.routes.get(dest)
        rq = Rreq(self.id, self.rreq_id, self.seq, dest, r.dest_seq if r is not None else None, 0)
        self.counters["rreq_originated"] += 1
        self.host.send_frame(self.id, Frame(RREQ, self.id, BROADCAST, Rreq.size, rq))
        wait = self._pdt * (2 ** state[0])
        state[1] = self.host.sim.schedule_in(wait, "route-timeout", self.id, self._discovery_timeout, dest)

    def _discovery_timeout(self, dest):
        state = self.discovery.get(dest)
        if state is None:
            return
        if self.route_lookup(dest) is not None:
            del self.discovery[dest]
            self._flush(dest)
            return
        if state[0] < self.p.rreq_retries:
            state[0] += 1
            self.originate_rreq(dest)
            return
        del self.discovery[dest]
        self.counters["discovery_failures"] += 1
        for pkt in self.buffer.pop(dest, ()):
            self.host.drop(self.id, pkt, "no_route")

    def _may_forward(self) -> bool:
        return self.flooding == FULL or self.in_backbone()

    def on_rreq(self, rq: Rreq, frm):
        now = self.host.sim.now
        self._neighbor_route(frm)
        key = (rq.orig, rq.rreq_id)
        hops = rq.hop_count + 1
        best = self.seen.get(key)
        if best is not None:
            if hops < best and rq.orig != self.id:
                self.seen[key] = hops
                self._update(rq.orig, frm, hops, rq.orig_seq, now + self._art)
            return "discard"
        self.seen[key] = hops
        rev = self._update(rq.orig, frm, hops, rq.orig_seq, now + self._art)
        if rq.dest == self.id:
            if rq.dest_seq is not None and rq.dest_seq > self.seq:
                self.seq = rq.dest_seq
            self.seq += 1
            rp = Rrep(rq.orig, self.id, self.seq, 0, to_us(self.p.my_route_timeout))
            self.host.send_frame(self.id, Frame(RREP, self.id, rev.next_hop, Rrep.size, rp))
            return "reply"
        fwd = self.routes.get(rq.dest)
        if (fwd is not None and fwd.usable(now) and fwd.dest_seq is not None
                and (rq.dest_seq is None or fwd.dest_seq >= rq.dest_seq)):
            fwd.precursors.add(frm)
            rev.precursors.add(fwd.next_hop)
            rp = Rrep(rq.orig, rq.dest, fwd.dest_seq, fwd.hop_count, fwd.lifetime - now)
            self.host.send_frame(self.id, Frame(RREP, self.id, rev.next_hop, Rrep.size, rp))
            return "reply"
        if not self._may_forward():
            self.counters["suppressed_forwards"] += 1
            return "discard"
        if hops >= self.p.net_diameter:
            return "discard"
        out = rq.forwarded(fwd.dest_seq if fwd is not None else None)
        frame = Frame(RREQ, self.id, BROADCAST, Rreq.size, out)
        if self._jitter > 0:
            delay = self.host.routing_rng.integer(0, self._jitter)
            self.host.sim.schedule_in(delay, "forward-jitter", self.id, self.host.send_frame, self.id, frame)
        else:
            self.host.send_frame(self.id, frame)
        return "forward"

    def on_rrep(self, rp: Rrep, frm):
        now = self.host.sim.now
        self._neighbor_route(frm)
        hops = rp.hop_count + 1
        fwd = self._update(rp.dest, frm, hops, rp.dest_seq, now + rp.lifetime)
        if rp.orig == self.id:
            state = self.discovery.pop(rp.dest, None)
            if state is not None:
                self.host.sim.cancel(state[1])
            self._flush(rp.dest)
            return "consume"
        rev = self.routes.get(rp.orig)
        if rev is None or not rev.usable(now):
            self.counters["rrep_dropped"] += 1
            return "discard"
        fwd.precursors.add(rev.next_hop)
        rev.precursors.add(frm)
        self._refresh(rp.orig)
        out = Rrep(rp.orig, rp.dest, rp.dest_seq, hops, rp.lifetime)
        self.host.send_frame(self.id, Frame(RREP, self.id, rev.next_hop, Rrep.size, out))
        return "forward"

    # -- maintenance ---------------------------------------------------------
    def handle_link_break(self, lost):
        now = self.host.sim.now
        unreachable, precursors = [], set()
        for dest in sorted(self.routes):
            r = self.routes[dest]
            if r.valid and r.next_hop == lost:
                r.valid = False
                if r.dest_seq is not None:
                    r.dest_seq += 1
                r.lifetime = now
                unreachable.append((dest, r.dest_seq))
                precursors |= r.precursors
        if unreachable and precursors:
            self._send_rerr(unreachable)
        return unreachable

    def on_rerr(self, re: Rerr, frm):
        now = self.host.sim.now
        out, precursors = [], set()
        for dest, seq in re.unreachable:
            r = self.routes.get(dest)
            if r is not None and r.valid and r.next_hop == frm:
                r.valid = False
                if seq is not None and (r.dest_seq is None or seq > r.dest_seq):
                    r.dest_seq = seq
                r.lifetime = now
                out.append((dest, r.dest_seq))
                precursors |= r.precursors
        if out and precursors:
            self._send_rerr(out)

    def _send_rerr(self, unreachable):
        re = Rerr(unreachable)
        self.host.send_frame(self.id, Frame(RERR, self.id, BROADCAST, re.size, re))

    def buffered(self):
        for q in self.buffer.values():
            yield from q
