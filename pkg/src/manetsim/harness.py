"""Single runs, seed sweeps, A/B comparison and their CSV forms."""
from __future__ import annotations

import csv
import io
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .network import Network, RunReport
from .scenario import ScenarioConfig, ScenarioError, dump_scenario, parse_scenario

REPORT_COLUMNS = ("seed", "mode", "sent", "delivered", "e2e_delay_ms", "jitter_ms",
                  "mac_drops", "control_tx", "suppressed_forwards", "throughput_bps")
REPORT_HEADER = ",".join(REPORT_COLUMNS)
METRICS = REPORT_COLUMNS[2:]
COMPARE_COLUMNS = ("metric", "seed", "a", "b", "difference", "ratio")
COMPARE_METRICS = ("e2e_delay_ms", "jitter_ms", "mac_drops", "control_tx",
                   "suppressed_forwards", "throughput_bps", "delivery_ratio")
AGGREGATES = ("median", "min", "max")
NA = "NA"


class ComparisonError(ValueError):
    """The two sweeps cannot be paired (different seeds or configuration)."""


def run(config: ScenarioConfig, trace=None, role_log=None) -> RunReport:
    return Network(config, trace=trace, role_log=role_log).run()


@dataclass
class SweepResult:
    config: ScenarioConfig | None
    rows: list                       # report rows (dicts), ordered by seed
    reports: list = field(default_factory=list)

    @property
    def seeds(self) -> list:
        return [r["seed"] for r in self.rows]

    @property
    def mode(self) -> str:
        return self.rows[0]["mode"] if self.rows else (self.config.mode if self.config else "")

    def aggregate(self) -> dict:
        return aggregate(self.rows)


def _run_seed(args):
    config, seed, trace_path = args
    cfg = config.replace(master_seed=seed)
    if trace_path is None:
        return run(cfg)
    with open(trace_path, "w", encoding="utf-8") as fh:
        return run(cfg, trace=fh)


def sweep(config: ScenarioConfig, seeds, workers: int = 1, trace_dir=None) -> SweepResult:
    seeds = sorted(set(int(s) for s in seeds))
    if not seeds:
        raise ValueError("sweep needs at least one seed")
    jobs = [(config, s, None if trace_dir is None else os.path.join(trace_dir, f"trace_{config.mode}_{s}.csv"))
            for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(_run_seed, jobs))
    else:
        reports = [_run_seed(j) for j in jobs]
    reports.sort(key=lambda r: r.seed)
    return SweepResult(config, [r.row() for r in reports], reports)


def _median(values):
    vals = [v for v in values if v is not None]
    return statistics.median(vals) if vals else None


def aggregate(rows) -> dict:
    """Median, min and max of every metric column, ignoring NA values."""
    out = {}
    for name, fn in (("median", _median),
                     ("min", lambda v: min((x for x in v if x is not None), default=None)),
                     ("max", lambda v: max((x for x in v if x is not None), default=None))):
        agg = {"seed": name, "mode": rows[0]["mode"] if rows else ""}
        for m in METRICS:
            agg[m] = fn([r[m] for r in rows])
        out[name] = agg
    return out


# -- CSV -------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return NA
    if isinstance(v, float):
        if math.isnan(v):
            return NA
        return repr(v)
    return str(v)


def _parse_cell(s: str):
    if s == NA:
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def format_rows(rows, columns=REPORT_COLUMNS) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_cell(r[c]) for c in columns) + "\n")
    return buf.getvalue()


def write_reports(path, rows, with_aggregate=False):
    rows = list(rows)
    if with_aggregate and rows:
        agg = aggregate(rows)
        rows = rows + [agg[k] for k in AGGREGATES]
    Path(path).write_text(format_rows(rows), encoding="utf-8")


def parse_rows(text: str, columns=REPORT_COLUMNS) -> list:
    lines = text.splitlines()
    if not lines or lines[0] != ",".join(columns):
        raise ValueError(f"unexpected header {lines[0] if lines else ''!r}")
    reader = csv.reader(lines[1:])
    rows = []
    for rec in reader:
        if not rec:
            continue
        row = {c: _parse_cell(v) for c, v in zip(columns, rec)}
        if "mode" in row and row["mode"] is not None:
            row["mode"] = str(row["mode"])
        rows.append(row)
    return rows


def read_reports(path) -> list:
    return parse_rows(Path(path).read_text(encoding="utf-8"))


def write_sweep(path, result: SweepResult):
    write_reports(path, result.rows, with_aggregate=True)
    if result.config is not None:
        Path(str(path) + ".scn").write_text(dump_scenario(result.config), encoding="utf-8")


def read_sweep(path) -> SweepResult:
    rows = [r for r in read_reports(path) if r["seed"] not in AGGREGATES]
    side = Path(str(path) + ".scn")
    config = parse_scenario(side.read_text(encoding="utf-8"), str(side)) if side.exists() else None
    return SweepResult(config, rows)


# -- comparison --------------------------------------------------------------------

_IGNORED_IN_PAIRING = ("mode", "master_seed")


def config_differences(a: ScenarioConfig, b: ScenarioConfig) -> list:
    ia, ib = a.file_items(), b.file_items()
    keys = sorted(set(ia) | set(ib))
    return [k for k in keys
            if k not in _IGNORED_IN_PAIRING and not k.startswith("pinned.") and ia.get(k) != ib.get(k)]


def _metric(row, m):
    if m == "delivery_ratio":
        return row["delivered"] / row["sent"] if row["sent"] else None
    return row[m]


def ratio(a, b):
    """b / a; 1.0 for equal values (0 vs 0 included), None when undefined."""
    if a is None or b is None:
        return None
    if a == b:
        return 1.0
    if a == 0:
        return None
    return b / a


@dataclass
class ComparisonReport:
    a_mode: str
    b_mode: str
    rows: list

    def median_row(self, metric) -> dict:
        return next(r for r in self.rows if r["metric"] == metric and r["seed"] == "median")

    def per_seed(self, metric) -> list:
        return [r for r in self.rows if r["metric"] == metric and r["seed"] != "median"]

    def to_csv(self) -> str:
        return format_rows(self.rows, COMPARE_COLUMNS)


def compare(a: SweepResult, b: SweepResult) -> ComparisonReport:
    """Pair two sweeps seed by seed (``a`` is conventionally CH_G, ``b`` CHG)."""
    sa, sb = a.seeds, b.seeds
    if sorted(sa) != sorted(sb):
        only_a = sorted(set(sa) - set(sb))
        only_b = sorted(set(sb) - set(sa))
        raise ComparisonError(f"seed sets differ: only in a {only_a}, only in b {only_b}")
    if a.config is not None and b.config is not None:
        diff = config_differences(a.config, b.config)
        if diff:
            raise ComparisonError("configurations differ in: " + ", ".join(diff))
    ra = {r["seed"]: r for r in a.rows}
    rb = {r["seed"]: r for r in b.rows}
    rows = []
    for m in COMPARE_METRICS:
        va, vb, ds, rs = [], [], [], []
        for s in sorted(ra):
            x, y = _metric(ra[s], m), _metric(rb[s], m)
            d = None if x is None or y is None else y - x
            q = ratio(x, y)
            rows.append({"metric": m, "seed": s, "a": x, "b": y, "difference": d, "ratio": q})
            va.append(x), vb.append(y), ds.append(d), rs.append(q)
        rows.append({"metric": m, "seed": "median", "a": _median(va), "b": _median(vb),
                     "difference": _median(ds), "ratio": _median(rs)})
    return ComparisonReport(a.mode, b.mode, rows)


def read_comparison(path) -> list:
    return parse_rows(Path(path).read_text(encoding="utf-8"), COMPARE_COLUMNS)


def trace_path(requested: str | None, default_name: str) -> str | None:
    """Where a trace goes: ``MANETSIM_TRACE_DIR`` overrides the directory."""
    if requested is None:
        return None
    override = os.environ.get("MANETSIM_TRACE_DIR")
    if override:
        name = os.path.basename(requested) or default_name
        return os.path.join(override, name)
    return requested


__all__ = [
    "REPORT_HEADER", "ComparisonError", "ComparisonReport", "ScenarioError", "SweepResult",
    "aggregate", "compare", "read_reports", "read_sweep", "run", "sweep", "write_reports", "write_sweep",
]
