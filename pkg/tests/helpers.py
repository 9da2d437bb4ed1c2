"""Small topologies and config builders shared by the tests."""
import random
from collections import deque

from manetsim.aodv import FULL
from manetsim.clustering import CH_G
from manetsim.network import Network
from manetsim.radio import GraphChannel
from manetsim.scenario import ScenarioConfig
from manetsim.traffic import CbrFlow


def line(n):
    return {i: {j for j in (i - 1, i + 1) if 1 <= j <= n} for i in range(1, n + 1)}


def complete(n):
    return {i: set(range(1, n + 1)) - {i} for i in range(1, n + 1)}


def from_edges(n, edges):
    adj = {i: set() for i in range(1, n + 1)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def random_graph(rng, n, p, connected=False):
    while True:
        edges = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if rng.random() < p]
        adj = from_edges(n, edges)
        if not connected or len(bfs(adj, 1)) == n:
            return adj


def bfs(adj, src):
    dist = {src: 0}
    q = deque([src])
    while q:
        v = q.popleft()
        for u in sorted(adj[v]):
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def graph_config(n, flows=(), sim_time=20.0, mode=CH_G, flooding=FULL, seed=1, **kw):
    return ScenarioConfig(node_count=n, sim_time=sim_time, mode=mode, flooding=flooding,
                          flows=tuple(flows), master_seed=seed, **kw)


def graph_net(adj, flows=(), link="dcf", delay_us=1, **kw):
    cfg = graph_config(len(adj), flows, **kw)
    return Network(cfg, channel=GraphChannel(adj, delay_us), link=link)


def flow(src, dst, start=5.0, end=10.0, rate=4.0, payload=512):
    return CbrFlow(src, dst, rate=rate, payload=payload, start=start, end=end)


def rng(seed):
    return random.Random(seed)
