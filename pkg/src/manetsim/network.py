"""Assemble mobility, radio, MAC, clustering, AODV and traffic into one run."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from . import clustering
from .aodv import AodvAgent
from .clustering import ClusterAgent
from .engine import GLOBAL, Simulator, Streams, to_us
from .mac import MacCounters, Medium
from .mobility import RandomWaypoint, Terrain
from .packets import (BEACON, BROADCAST, DATA, RERR, ROLE_CHANGE, RREP, RREQ, DataPacket, Frame)
from .radio import RadioParams, UnitDiskChannel
from .scenario import ScenarioConfig
from .traffic import FlowStats, avg_jitter, control_overhead, end_to_end_delay, generate, throughput

_TX_COUNTER = {BEACON: "beacon_tx", ROLE_CHANGE: "role_change_tx", RREQ: "rreq_tx",
               RREP: "rrep_tx", RERR: "rerr_tx", DATA: "data_tx"}


@dataclass
class Snapshot:
    time: float
    backbone: int              # distributed state at this instant
    stable: bool               # no pending or undecided role anywhere
    ref_backbone_ch_g: int     # centralized formation on the same topology
    ref_backbone_chg: int


@dataclass
class RunReport:
    mode: str
    seed: int
    sent: int
    delivered: int
    e2e_delay_mean: float | None   # seconds
    jitter_mean: float | None      # seconds
    mac_drops: int
    control_tx: int
    suppressed_forwards: int
    throughput: float              # bits/s
    counters: dict = field(default_factory=dict)
    mac: dict = field(default_factory=dict)
    flows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    events: int = 0

    @property
    def delivery_ratio(self) -> float | None:
        return self.delivered / self.sent if self.sent else None

    def row(self) -> dict:
        """The fields written to the report CSV (delay and jitter in ms)."""
        ms = lambda v: None if v is None else v * 1000.0
        return {
            "seed": self.seed,
            "mode": self.mode,
            "sent": self.sent,
            "delivered": self.delivered,
            "e2e_delay_ms": ms(self.e2e_delay_mean),
            "jitter_ms": ms(self.jitter_mean),
            "mac_drops": self.mac_drops,
            "control_tx": self.control_tx,
            "suppressed_forwards": self.suppressed_forwards,
            "throughput_bps": self.throughput,
        }


class IdealLink:
    """Contention-free link layer: every frame reaches all neighbours after a
    fixed delay. Used to check routing logic in isolation from the MAC."""

    def __init__(self, sim, channel, listener, hop_delay_us=1000):
        self.sim = sim
        self.channel = channel
        self.listener = listener
        self.hop_delay_us = hop_delay_us
        self.macs = {n: _IdealPort(n, self) for n in channel.nodes}
        self.in_transit = []

    def in_flight_frames(self):
        for frame, nodes in self.in_transit:
            if frame.dst in nodes:
                yield frame

    def send(self, node, frame):
        now = self.sim.now
        nbrs = [n for n, _ in self.channel.receivers_with_delay(node, now / 1e6)]
        self.listener.on_transmit(node, frame)
        if frame.dst != BROADCAST and frame.dst not in nbrs:
            self.sim.schedule_in(self.hop_delay_us, "ack-timeout", node, self._fail, node, frame)
            return
        entry = (frame, nbrs)
        self.in_transit.append(entry)
        self.sim.schedule_in(self.hop_delay_us, "frame-delivery", node, self._deliver, entry)

    def _deliver(self, entry):
        self.in_transit.remove(entry)
        frame, nodes = entry
        for r in nodes:
            if frame.dst == BROADCAST or frame.dst == r:
                self.listener.on_receive(r, frame)

    def _fail(self, node, frame):
        self.listener.on_mac_drop(node, frame, "retry")
        self.listener.on_link_failure(node, frame)


class _IdealPort:
    def __init__(self, node, link):
        self.node, self.link = node, link
        self.queue = ()
        self.counters = MacCounters()

    def enqueue(self, frame):
        self.link.send(self.node, frame)
        return True

    def remove_where(self, pred):
        return []


class Network:
    """One simulation run. ``channel`` overrides the unit-disk radio (e.g. with
    a fixed graph); ``link='ideal'`` swaps the DCF MAC for ``IdealLink``."""

    def __init__(self, config: ScenarioConfig, *, channel=None, link="dcf",
                 trace=None, role_log=None):
        self.cfg = cfg = config
        self.sim = Simulator(trace)
        self.streams = Streams(cfg.master_seed)
        self.role_log = role_log
        self.mode = cfg.mode
        if channel is None:
            self.mobility = RandomWaypoint(
                cfg.node_count, Terrain(*cfg.terrain), self.streams,
                speed_min=cfg.speed_min, speed_max=cfg.speed_max, pause_time=cfg.pause_time,
                start_time=cfg.mobility_start, end_time=cfg.sim_time)
            channel = UnitDiskChannel(self.mobility, RadioParams(cfg.tx_range, bitrate=cfg.bitrate))
        else:
            self.mobility = None
        self.channel = channel
        self.nodes = list(range(1, cfg.node_count + 1))
        if sorted(channel.nodes) != self.nodes:
            raise ValueError("channel node ids must be 1..node_count")
        if link == "ideal":
            self.medium = IdealLink(self.sim, channel, self)
        else:
            self.medium = Medium(self.sim, channel, cfg.bitrate, cfg.mac, self.streams["mac-backoff"], self)
            for n in self.nodes:
                self.medium.add(n)
        self.macs = self.medium.macs
        self.routing_counters = Counter()
        self.routing_rng = self.streams["routing"]
        self.tx_counts = Counter()
        self.clusters = {}
        self.aodv = {}
        for n in self.nodes:
            pin = cfg.pinned_roles.get(n)
            if cfg.pinned_roles:
                pinned = (pin.role, pin.cluster) if pin else (clustering.Role.ORDINARY, None)
            else:
                pinned = None
            agent = ClusterAgent(n, cfg.mode, cfg.cluster, self, pinned)
            self.clusters[n] = agent
            self.aodv[n] = AodvAgent(n, cfg.aodv, self, cfg.flooding, backbone=_backbone_of(agent))
        if cfg.pinned_roles:
            heads = sorted(n for n, a in self.clusters.items() if a.kind in clustering.HEAD_ROLES)
            for a in self.clusters.values():
                if a.cluster_id is None and heads:
                    a.cluster_id = a.head = heads[0]
        self.flow_stats = [FlowStats(f) for f in cfg.flows]
        self.snapshots = []
        self._end_us = to_us(cfg.sim_time)
        self._schedule_initial()

    # -- setup -----------------------------------------------------------------
    def _schedule_initial(self):
        sim, cfg = self.sim, self.cfg
        rng = self.streams["beacon"]
        interval = to_us(cfg.cluster.beacon_interval)
        jitter = int(interval * cfg.cluster.beacon_jitter)
        self._beacon = {}
        for n in self.nodes:
            phase = rng.integer(1, interval - jitter - 1)
            self._beacon[n] = (phase, rng.child(n))
            sim.schedule(phase, "beacon-timer", n, self._on_beacon_timer, n, 0)
        if self.mobility is not None:
            for n in self.nodes:
                self._schedule_waypoint(n, 0)
        for i, f in enumerate(cfg.flows):
            sends = generate(f)
            if sends:
                sim.schedule(sends[0], "traffic-send", f.src, self._on_send, i, 0, sends)
        if cfg.snapshot_interval > 0:
            step = to_us(cfg.snapshot_interval)
            if step <= self._end_us:
                sim.schedule(step, "snapshot", GLOBAL, self._on_snapshot, step)
        sim.schedule(self._end_us, "sim-end", GLOBAL, lambda: None)

    def _schedule_waypoint(self, n, idx):
        legs = self.mobility.trajectories[n].legs
        if idx >= len(legs):
            return
        t = to_us(legs[idx].arrive_time)
        if t <= self._end_us:
            self.sim.schedule(max(t, self.sim.now), "mobility-waypoint", n, self._on_waypoint, n, idx)

    # -- event handlers -------------------------------------------------------
    def _on_waypoint(self, n, idx):
        self.mobility.advance(n, idx + 1)
        self._schedule_waypoint(n, idx + 1)

    def _on_beacon_timer(self, n, k):
        self.clusters[n].tick()
        phase, rng = self._beacon[n]
        interval = to_us(self.cfg.cluster.beacon_interval)
        jitter = int(interval * self.cfg.cluster.beacon_jitter)
        t = (k + 1) * interval + phase + rng.integer(0, jitter)
        if t <= self._end_us:
            self.sim.schedule(t, "beacon-timer", n, self._on_beacon_timer, n, k + 1)

    def _on_send(self, i, seq, sends):
        f = self.cfg.flows[i]
        self.flow_stats[i].on_send()
        pkt = DataPacket(i, seq, f.src, f.dst, self.sim.now, f.payload)
        self.aodv[f.src].send_data(pkt)
        if seq + 1 < len(sends):
            self.sim.schedule(sends[seq + 1], "traffic-send", f.src, self._on_send, i, seq + 1, sends)

    def _on_snapshot(self, t_us):
        t = t_us / 1e6
        adj = self.channel.adjacency(t)
        sizes = {m: len(clustering.backbone(clustering.form_clusters(adj, m), m)) for m in clustering.MODES}
        agents = self.clusters.values()
        stable = all(a.status != clustering.UNDECIDED and a.pending is None for a in agents)
        self.snapshots.append(Snapshot(t, sum(1 for a in agents if a.backbone), stable,
                                       sizes[clustering.CH_G], sizes[clustering.CHG]))
        nxt = t_us + to_us(self.cfg.snapshot_interval)
        if nxt <= self._end_us:
            self.sim.schedule(nxt, "snapshot", GLOBAL, self._on_snapshot, nxt)

    # -- host interface used by agents and the MAC ---------------------------
    def send_frame(self, node, frame):
        self.macs[node].enqueue(frame)

    def on_transmit(self, node, frame):
        self.tx_counts[_TX_COUNTER[frame.kind]] += 1

    def on_receive(self, node, frame):
        kind = frame.kind
        if kind == BEACON or kind == ROLE_CHANGE:
            self.clusters[node].on_beacon(frame.payload)
        elif kind == DATA:
            self.aodv[node].on_data(frame.payload, frame.src)
        elif kind == RREQ:
            self.aodv[node].on_rreq(frame.payload, frame.src)
        elif kind == RREP:
            self.aodv[node].on_rrep(frame.payload, frame.src)
        elif kind == RERR:
            self.aodv[node].on_rerr(frame.payload, frame.src)

    def on_mac_drop(self, node, frame, reason):
        if frame.kind == DATA:
            self.flow_stats[frame.payload.flow].on_drop("mac_" + reason)

    def on_link_failure(self, node, frame):
        self.routing_counters["link_breaks"] += 1
        self._link_break(node, frame.dst)

    def on_neighbor_lost(self, node, nbr):
        agent = self.aodv[node]
        if any(r.valid and r.next_hop == nbr for r in agent.routes.values()):
            self.routing_counters["neighbor_timeouts"] += 1
            self._link_break(node, nbr)

    def _link_break(self, node, lost):
        self.aodv[node].handle_link_break(lost)
        stranded = self.macs[node].remove_where(lambda f: f.dst == lost)
        for f in stranded:
            if f.kind == DATA:
                self.aodv[node].send_data(f.payload)
            else:
                self.routing_counters["control_flushed"] += 1

    def deliver(self, node, pkt):
        self.flow_stats[pkt.flow].on_deliver(pkt.seq, pkt.send_time, self.sim.now)

    def drop(self, node, pkt, reason):
        self.flow_stats[pkt.flow].on_drop(reason)

    def on_role_change(self, node, old, new, cluster_id):
        if self.role_log is not None:
            self.role_log.write(f"{self.sim.now},{node},{old},{new},{cluster_id}\n")

    # -- run ---------------------------------------------------------------------
    def roles(self) -> dict:
        return {n: a.role for n, a in self.clusters.items()}

    def in_flight(self) -> list:
        """Per-flow count of data packets still queued, buffered or on the air."""
        counts = [0] * len(self.flow_stats)
        for frame in self.medium.in_flight_frames():
            if frame.kind == DATA:
                counts[frame.payload.flow] += 1
        for a in self.aodv.values():
            for pkt in a.buffered():
                counts[pkt.flow] += 1
        return counts

    def run(self, until: float | None = None) -> RunReport:
        t_end = self._end_us if until is None else min(to_us(until), self._end_us)
        self.sim.run_until(t_end)
        return self.report()

    def report(self) -> RunReport:
        samples = [s for fs in self.flow_stats for s in fs.samples]
        pairs = []
        for fs in self.flow_stats:
            j = avg_jitter(fs.samples)
            if j is not None:
                pairs.append((j, fs.delivered - 1))
        jitter = math.fsum(j * w for j, w in pairs) / sum(w for _, w in pairs) if pairs else None
        counters = dict(self.tx_counts)
        counters.update(self.routing_counters)
        counters.setdefault("suppressed_forwards", 0)
        in_flight = self.in_flight()
        flows = []
        for i, fs in enumerate(self.flow_stats):
            flows.append({
                "src": fs.flow.src, "dst": fs.flow.dst, "sent": fs.sent, "delivered": fs.delivered,
                "drops": dict(sorted(fs.drops.items())), "in_flight": in_flight[i],
                "duplicates": fs.duplicates,
            })
        mac = {n: m.counters.as_dict() for n, m in sorted(self.macs.items())}
        return RunReport(
            mode=self.mode,
            seed=self.cfg.master_seed,
            sent=sum(fs.sent for fs in self.flow_stats),
            delivered=len(samples),
            e2e_delay_mean=end_to_end_delay(samples),
            jitter_mean=jitter,
            mac_drops=sum(m["drops"] for m in mac.values()),
            control_tx=control_overhead(counters),
            suppressed_forwards=counters["suppressed_forwards"],
            throughput=math.fsum(throughput(fs.samples, fs.flow) for fs in self.flow_stats),
            counters=dict(sorted(counters.items())),
            mac=mac,
            flows=flows,
            snapshots=list(self.snapshots),
            events=self.sim.processed,
        )


def _backbone_of(agent):
    return lambda: agent.backbone


def run(config: ScenarioConfig, **kw) -> RunReport:
    return Network(config, **kw).run()
