"""One 300 s run of the bundled CHG scenario.

Thirty nodes wander a 1500 m square; node 12 streams CBR to node 17 and
route requests may only be rebroadcast by the two hand-placed cluster head
gateways (15 and 30).
"""
import sys

from manetsim import bundled_scenario, run

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 2
cfg = bundled_scenario("paper_chg.scn").replace(master_seed=seed)
rep = run(cfg)

print(f"mode {rep.mode}, seed {rep.seed}, {rep.events} events")
print(f"sent {rep.sent}, delivered {rep.delivered} ({(rep.delivery_ratio or 0):.1%})")
f = rep.flows[0]
print(f"drops by reason: {f['drops']}, still in flight: {f['in_flight']}")
if rep.e2e_delay_mean is not None:
    print(f"mean delay {rep.e2e_delay_mean * 1e3:.2f} ms, jitter "
          f"{(rep.jitter_mean or 0) * 1e3:.2f} ms, throughput {rep.throughput:.0f} b/s")
print(f"MAC drops {rep.mac_drops}, control frames {rep.control_tx}, "
      f"suppressed forwards {rep.suppressed_forwards}")

# the backbone stays at the two pinned nodes while the topology changes under it
for s in rep.snapshots[:5]:
    print(f"  t={s.time:5.0f}s backbone={s.backbone}  elected backbone on this topology: "
          f"CH_G {s.ref_backbone_ch_g}, CHG {s.ref_backbone_chg}")
