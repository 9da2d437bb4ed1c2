"""What backbone-restricted flooding saves, with roles elected rather than pinned.

The same mobility and traffic run three ways: every node rebroadcasts route
requests, only CH&G backbone nodes do, and only CHG nodes do.
"""
import sys

from manetsim import bundled_scenario, run

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 4
base = bundled_scenario("paper_chgw.scn").replace(pinned_roles={}, master_seed=seed)
variants = [
    ("full flooding", base.replace(flooding="full")),
    ("CH_G backbone", base),
    ("CHG backbone", base.replace(mode="CHG")),
]
print(f"{'variant':15} {'delivered':>9} {'rreq_tx':>8} {'suppressed':>10} {'control':>8} {'mac_drops':>9}")
for name, cfg in variants:
    r = run(cfg)
    print(f"{name:15} {r.delivered:9d} {r.counters.get('rreq_tx', 0):8d} {r.suppressed_forwards:10d} "
          f"{r.control_tx:8d} {r.mac_drops:9d}")
