"""Frames and the network-layer packets they carry."""
from __future__ import annotations

BROADCAST = -1

MAC_HEADER = 30     # 802.11 data header + FCS
IP_UDP_HEADER = 28  # IPv4 20 + UDP 8
RREQ_BODY = 24
RREP_BODY = 20
RERR_BASE = 4
RERR_PER_DEST = 8
BEACON_BODY = 16

DATA, RREQ, RREP, RERR, BEACON, ROLE_CHANGE = "data", "rreq", "rrep", "rerr", "beacon", "role-change"
CONTROL_KINDS = frozenset((RREQ, RREP, RERR, BEACON, ROLE_CHANGE))


class Frame:
    __slots__ = ("kind", "src", "dst", "size", "payload")

    def __init__(self, kind, src, dst, size, payload):
        self.kind = kind
        self.src = src          # transmitting node
        self.dst = dst          # next hop or BROADCAST
        self.size = size        # bytes on air, all headers included
        self.payload = payload

    @property
    def broadcast(self) -> bool:
        return self.dst == BROADCAST

    def __repr__(self):
        return f"Frame({self.kind} {self.src}->{self.dst} {self.size}B)"


class DataPacket:
    __slots__ = ("flow", "seq", "src", "dst", "send_time", "payload_bytes", "hops")

    def __init__(self, flow, seq, src, dst, send_time, payload_bytes):
        self.flow = flow
        self.seq = seq
        self.src = src
        self.dst = dst
        self.send_time = send_time  # us
        self.payload_bytes = payload_bytes
        self.hops = 0

    @property
    def size(self) -> int:
        return MAC_HEADER + IP_UDP_HEADER + self.payload_bytes


class Rreq:
    __slots__ = ("orig", "rreq_id", "orig_seq", "dest", "dest_seq", "hop_count")

    size = MAC_HEADER + IP_UDP_HEADER + RREQ_BODY

    def __init__(self, orig, rreq_id, orig_seq, dest, dest_seq, hop_count=0):
        self.orig = orig
        self.rreq_id = rreq_id
        self.orig_seq = orig_seq
        self.dest = dest
        self.dest_seq = dest_seq    # None when unknown
        self.hop_count = hop_count

    def forwarded(self, dest_seq=None) -> "Rreq":
        ds = self.dest_seq
        if dest_seq is not None and (ds is None or dest_seq > ds):
            ds = dest_seq
        return Rreq(self.orig, self.rreq_id, self.orig_seq, self.dest, ds, self.hop_count + 1)


class Rrep:
    __slots__ = ("orig", "dest", "dest_seq", "hop_count", "lifetime")

    size = MAC_HEADER + IP_UDP_HEADER + RREP_BODY

    def __init__(self, orig, dest, dest_seq, hop_count, lifetime):
        self.orig = orig
        self.dest = dest
        self.dest_seq = dest_seq
        self.hop_count = hop_count
        self.lifetime = lifetime  # us


class Rerr:
    __slots__ = ("unreachable",)

    def __init__(self, unreachable):
        self.unreachable = tuple(unreachable)  # ((dest, seq), ...)

    @property
    def size(self) -> int:
        return MAC_HEADER + IP_UDP_HEADER + RERR_BASE + RERR_PER_DEST * len(self.unreachable)


class Beacon:
    """Cluster beacon. ``head`` is the formation head (None while undecided)."""

    __slots__ = ("sender", "cluster_id", "role", "seq", "head", "boundary")

    size = MAC_HEADER + BEACON_BODY

    def __init__(self, sender, cluster_id, role, seq, head, boundary):
        self.sender = sender
        self.cluster_id = cluster_id
        self.role = role
        self.seq = seq
        self.head = head
        self.boundary = boundary
