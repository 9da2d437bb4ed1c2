"""Lowest-ID clustering in two architectures.

``CH_G``: separate cluster heads and gateways (members hearing another
cluster). ``CHG``: after lowest-ID formation the head role of each cluster
moves to its lowest-id boundary member, which then serves as both head and
gateway; every other node is Ordinary.

The module has two faces: pure functions over a static adjacency (used for
snapshots and as the reference the distributed agent must converge to), and
``ClusterAgent``, the beacon-driven per-node protocol run inside the
simulator.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .engine import to_us
from .packets import BROADCAST, BEACON, ROLE_CHANGE, Beacon, Frame

CH_G = "CH_G"
CHG = "CHG"
MODES = (CH_G, CHG)


class Role(str, Enum):
    ORDINARY = "Ordinary"
    GATEWAY = "Gateway"
    CLUSTER_HEAD = "ClusterHead"
    CLUSTER_HEAD_GATEWAY = "ClusterHeadGateway"

    def __str__(self):
        return self.value


ALLOWED_ROLES = {
    CH_G: frozenset((Role.ORDINARY, Role.GATEWAY, Role.CLUSTER_HEAD)),
    CHG: frozenset((Role.ORDINARY, Role.CLUSTER_HEAD_GATEWAY)),
}
HEAD_ROLES = frozenset((Role.CLUSTER_HEAD, Role.CLUSTER_HEAD_GATEWAY))


@dataclass(frozen=True)
class ClusterRole:
    kind: Role
    cluster_id: int


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown clustering mode {mode!r}; expected one of {MODES}")
    return mode


def is_backbone(kind: Role, mode: str) -> bool:
    if mode == CH_G:
        return kind is Role.CLUSTER_HEAD or kind is Role.GATEWAY
    return kind is Role.CLUSTER_HEAD_GATEWAY


# -- static (centralized) formation ------------------------------------------

def lowest_id_formation(adj: dict) -> dict:
    """Map every node to its cluster head under lowest-ID election."""
    head_of = {}
    for v in sorted(adj):
        heads = [u for u in adj[v] if u < v and head_of.get(u) == u]
        head_of[v] = min(heads) if heads else v
    return head_of


def boundary_members(head_of: dict, adj: dict) -> set:
    return {v for v in adj if any(head_of[u] != head_of[v] for u in adj[v])}


def promote_chg(head_of: dict, adj: dict) -> dict:
    """Map each formation head to the node taking the merged CHG role."""
    boundary = boundary_members(head_of, adj)
    chg = {}
    for v in sorted(adj):
        h = head_of[v]
        if v in boundary and h not in chg:
            chg[h] = v  # ascending scan: first boundary member is the lowest
    for h in set(head_of.values()):
        chg.setdefault(h, h)
    return chg


def classify(node, head_of: dict, adj: dict, mode: str) -> Role:
    h = head_of[node]
    if mode == CH_G:
        if h == node:
            return Role.CLUSTER_HEAD
        if any(head_of[u] != h for u in adj[node]):
            return Role.GATEWAY
        return Role.ORDINARY
    chg = promote_chg(head_of, adj)
    return Role.CLUSTER_HEAD_GATEWAY if chg[h] == node else Role.ORDINARY


def form_clusters(adj: dict, mode: str) -> dict:
    """Roles for every node of a static topology: ``{node: ClusterRole}``."""
    check_mode(mode)
    head_of = lowest_id_formation(adj)
    roles = {}
    if mode == CH_G:
        boundary = boundary_members(head_of, adj)
        for v in adj:
            h = head_of[v]
            if h == v:
                kind = Role.CLUSTER_HEAD
            elif v in boundary:
                kind = Role.GATEWAY
            else:
                kind = Role.ORDINARY
            roles[v] = ClusterRole(kind, h)
        return roles
    chg = promote_chg(head_of, adj)
    for v in adj:
        c = chg[head_of[v]]
        roles[v] = ClusterRole(Role.CLUSTER_HEAD_GATEWAY if c == v else Role.ORDINARY, c)
    return roles


def backbone(roles: dict, mode: str) -> set:
    return {v for v, r in roles.items() if is_backbone(r.kind, mode)}


# -- distributed protocol ----------------------------------------------------

@dataclass(frozen=True)
class ClusterParams:
    beacon_interval: float = 1.0
    neighbor_timeout: float = 3.0
    stability_window: float = 2.0
    formation_delay: float = 2.0
    beacon_jitter: float = 0.1   # fraction of the interval


class Neighbor:
    __slots__ = ("last_heard", "head", "boundary", "cluster_id", "role")

    def __init__(self, last_heard, head, boundary, cluster_id, role):
        self.last_heard = last_heard
        self.head = head
        self.boundary = boundary
        self.cluster_id = cluster_id
        self.role = role


UNDECIDED, HEAD, MEMBER = "undecided", "head", "member"


class ClusterAgent:
    """Beacon-driven lowest-ID clustering for one node.

    Decisions are re-evaluated at every own beacon. A node leaves the
    undecided state immediately once allowed to decide; later changes must
    persist for ``stability_window`` before they apply.
    """

    def __init__(self, node_id, mode, params: ClusterParams, host, pinned=None):
        self.id = node_id
        self.mode = check_mode(mode)
        self.params = params
        self.host = host        # Network: sim, send, callbacks
        self.nbrs: dict = {}
        self.status = UNDECIDED
        self.head = None
        self.kind = Role.ORDINARY
        self.cluster_id = None
        self.beacon_seq = 0
        self.pending = None     # (desired, since_us)
        self.pinned = pinned    # None, or (Role, fixed cluster id or None)
        self._timeout_us = to_us(params.neighbor_timeout)
        self._window_us = to_us(params.stability_window)
        self._formation_us = to_us(params.formation_delay)
        if pinned is not None:
            kind, cid = pinned
            self.kind = kind
            self.status = HEAD if kind in HEAD_ROLES else MEMBER
            self.cluster_id = node_id if kind in HEAD_ROLES else cid
            self.head = self.cluster_id

    @property
    def role(self) -> ClusterRole:
        return ClusterRole(self.kind, self.cluster_id)

    @property
    def backbone(self) -> bool:
        return is_backbone(self.kind, self.mode)

    # -- beacons -------------------------------------------------------------
    def on_beacon(self, b: Beacon):
        now = self.host.sim.now
        e = self.nbrs.get(b.sender)
        if e is None:
            self.nbrs[b.sender] = Neighbor(now, b.head, b.boundary, b.cluster_id, b.role)
        else:
            e.last_heard = now
            e.head = b.head
            e.boundary = b.boundary
            e.cluster_id = b.cluster_id
            e.role = b.role

    def tick(self):
        """Periodic work at the node's beacon instant."""
        now = self.host.sim.now
        self.purge(now)
        if self.pinned is not None:
            self._update_pinned()
        else:
            self._elect(now)
        self._send(BEACON)

    def purge(self, now) -> list:
        limit = now - self._timeout_us
        lost = [n for n, e in self.nbrs.items() if e.last_heard < limit]
        for n in lost:
            del self.nbrs[n]
            self.host.on_neighbor_lost(self.id, n)
        return lost

    def _beacon(self) -> Beacon:
        self.beacon_seq += 1
        return Beacon(self.id, self.cluster_id, self.kind, self.beacon_seq,
                      self.head, self._boundary(self.head))

    def _send(self, kind):
        b = self._beacon()
        self.host.send_frame(self.id, Frame(kind, self.id, BROADCAST, Beacon.size, b))

    # -- election ------------------------------------------------------------
    def _boundary(self, head) -> bool:
        if head is None:
            return False
        return any(e.head is not None and e.head != head for e in self.nbrs.values())

    def desired(self):
        """Role tuple (status, head, kind, cluster_id) the rules currently ask for."""
        me, nb = self.id, self.nbrs
        heads = [n for n, e in nb.items() if e.head == n]
        if any(h < me for h in heads):
            status, head = MEMBER, min(heads)
        elif all(e.head is not None for n, e in nb.items() if n < me):
            status, head = HEAD, me
        elif self.status != UNDECIDED:
            status, head = self.status, self.head
        else:
            return (UNDECIDED, None, Role.ORDINARY, None)
        boundary = self._boundary(head)
        if self.mode == CH_G:
            if status == HEAD:
                kind = Role.CLUSTER_HEAD
            else:
                kind = Role.GATEWAY if boundary else Role.ORDINARY
            return (status, head, kind, head)
        if status == HEAD:
            cands = [n for n, e in nb.items() if e.head == me and e.boundary]
            if boundary:
                cands.append(me)
            cid = min(cands) if cands else me
        else:
            he = nb.get(head)
            cid = he.cluster_id if he is not None and he.head == head and he.cluster_id is not None else head
        kind = Role.CLUSTER_HEAD_GATEWAY if cid == me else Role.ORDINARY
        return (status, head, kind, cid)

    def _elect(self, now):
        want = self.desired()
        current = (self.status, self.head, self.kind, self.cluster_id)
        if want == current:
            self.pending = None
            return
        if self.status == UNDECIDED:
            if want[0] != UNDECIDED and now >= self._formation_us:
                self._apply(want, announce=False)
            return
        if self.pending is None or self.pending[0] != want:
            self.pending = (want, now)
            return
        if now - self.pending[1] >= self._window_us:
            announce = (want[0], want[1]) != (self.status, self.head)
            self._apply(want, announce=announce)

    def _apply(self, want, announce):
        old = (self.kind, self.cluster_id)
        self.status, self.head, self.kind, self.cluster_id = want
        self.pending = None
        if old != (self.kind, self.cluster_id):
            self.host.on_role_change(self.id, old[0], self.kind, self.cluster_id)
        if announce:
            self._send(ROLE_CHANGE)

    def _update_pinned(self):
        kind, fixed = self.pinned
        if kind in HEAD_ROLES or fixed is not None:
            return
        heads = [n for n, e in self.nbrs.items() if e.role in HEAD_ROLES]
        if heads:
            cid = min(heads)
            if cid != self.cluster_id:
                old = self.kind
                self.cluster_id = self.head = cid
                self.host.on_role_change(self.id, old, self.kind, cid)
