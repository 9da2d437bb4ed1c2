"""Command line: ``manetsim run | sweep | compare``."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import harness
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_CONFIG = 2


def _parser():
    p = argparse.ArgumentParser(prog="manetsim", description="Clustered MANET simulator (CH&G vs CHG).")
    sub = p.add_subparsers(dest="verb", required=True)

    r = sub.add_parser("run", help="simulate one seed and write a one-row report")
    r.add_argument("--scenario", required=True, help="scenario file, or a bundled name such as paper_chg.scn")
    r.add_argument("--seed", type=int, default=None, help="overrides master_seed")
    r.add_argument("--out", required=True)
    r.add_argument("--trace", help="event trace file (time_us,seq,kind,target)")
    r.add_argument("--roles", help="role change log (time_us,node,old,new,cluster)")

    s = sub.add_parser("sweep", help="simulate seeds 1..N and write rows plus aggregates")
    s.add_argument("--scenario", required=True)
    s.add_argument("--seeds", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--trace", help="directory for one event trace per seed")
    s.add_argument("--workers", type=int, default=1)

    c = sub.add_parser("compare", help="pair two sweeps seed by seed")
    c.add_argument("--a", required=True, help="baseline sweep CSV (usually CH_G)")
    c.add_argument("--b", required=True, help="candidate sweep CSV (usually CHG)")
    c.add_argument("--out", required=True)
    return p


def _open(path):
    if path is None:
        return None
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8")


def _cmd_run(args):
    cfg = load_scenario(args.scenario)
    if args.seed is not None:
        cfg = cfg.replace(master_seed=args.seed)
    trace = _open(harness.trace_path(args.trace, f"trace_{cfg.mode}_{cfg.master_seed}.csv"))
    roles = _open(args.roles)
    try:
        report = harness.run(cfg, trace=trace, role_log=roles)
    finally:
        for fh in (trace, roles):
            if fh is not None:
                fh.close()
    harness.write_reports(args.out, [report.row()])
    print(f"{cfg.mode} seed {cfg.master_seed}: sent {report.sent}, delivered {report.delivered}, "
          f"mac_drops {report.mac_drops}, control_tx {report.control_tx}")


def _cmd_sweep(args):
    cfg = load_scenario(args.scenario)
    if args.seeds < 1:
        raise ScenarioError("--seeds: must be >= 1")
    trace_dir = None
    if args.trace is not None:
        trace_dir = os.environ.get("MANETSIM_TRACE_DIR") or args.trace
        Path(trace_dir).mkdir(parents=True, exist_ok=True)
    result = harness.sweep(cfg, range(1, args.seeds + 1), workers=args.workers, trace_dir=trace_dir)
    harness.write_sweep(args.out, result)
    med = result.aggregate()["median"]
    print(f"{cfg.mode}: {args.seeds} seeds, median mac_drops {med['mac_drops']}, "
          f"median control_tx {med['control_tx']}")


def _cmd_compare(args):
    a = harness.read_sweep(args.a)
    b = harness.read_sweep(args.b)
    rep = harness.compare(a, b)
    Path(args.out).write_text(rep.to_csv(), encoding="utf-8")
    for m in harness.COMPARE_METRICS:
        row = rep.median_row(m)
        print(f"{m}: a={row['a']} b={row['b']} diff={row['difference']} ratio={row['ratio']}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    cmd = {"run": _cmd_run, "sweep": _cmd_sweep, "compare": _cmd_compare}[args.verb]
    try:
        cmd(args)
    except (ScenarioError, harness.ComparisonError, FileNotFoundError, ValueError) as e:
        print(f"manetsim: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK
