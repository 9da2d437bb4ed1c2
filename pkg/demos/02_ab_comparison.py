"""CH&G against CHG over matched seeds.

Both bundled scenarios share every setting except the architecture and the
hand-placed roles, so with equal seeds the nodes follow identical paths.
"""
import sys
import time

from manetsim import bundled_scenario, compare, sweep

n = int(sys.argv[1]) if len(sys.argv) > 1 else 10
seeds = range(1, n + 1)

t0 = time.perf_counter()
a = sweep(bundled_scenario("paper_chgw.scn"), seeds, workers=2)
b = sweep(bundled_scenario("paper_chg.scn"), seeds, workers=2)
print(f"{2 * n} runs in {time.perf_counter() - t0:.1f}s\n")

cmp = compare(a, b)
print(f"{'metric':22} {'CH_G':>12} {'CHG':>12} {'ratio':>8}")
fmt = lambda v: "NA" if v is None else f"{v:12.4g}"
for m in ("e2e_delay_ms", "jitter_ms", "mac_drops", "control_tx", "suppressed_forwards",
          "throughput_bps", "delivery_ratio"):
    r = cmp.median_row(m)
    ratio = "NA" if r["ratio"] is None else f"{r['ratio']:.3f}"
    print(f"{m:22} {fmt(r['a'])} {fmt(r['b'])} {ratio:>8}")

wins = sum(r["b"] >= r["a"] for r in cmp.per_seed("suppressed_forwards"))
print(f"\nseeds where CHG suppressed at least as many forwards: {wins}/{n}")
