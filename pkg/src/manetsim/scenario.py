"""Scenario configuration: defaults, validation and the ``.scn`` file format.

A scenario file is UTF-8 ``key=value`` lines; ``#`` starts a comment.
Flows use indexed keys (``flow.0.src=12``) and pinned roles use
``pinned.<node>=<Role>[@<cluster>]``. Node ids run from 1 to node_count.
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .aodv import BACKBONE, FULL, AodvParams
from .clustering import ALLOWED_ROLES, CH_G, CHG, HEAD_ROLES, MODES, ClusterParams, Role
from .mac import MacParams
from .mobility import MIN_EFFECTIVE_SPEED
from .traffic import CbrFlow


class ScenarioError(ValueError):
    """Invalid scenario; the message names the file line or key at fault."""


@dataclass(frozen=True)
class PinnedRole:
    role: Role
    cluster: int | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    terrain: tuple = (1500.0, 1500.0)
    node_count: int = 30
    speed_min: float = 0.0
    speed_max: float = 10.0
    pause_time: float = 0.0
    mobility_start: float = 10.0
    sim_time: float = 300.0
    tx_range: float = 250.0
    mode: str = CHG
    flooding: str = BACKBONE
    flows: tuple = ()
    pinned_roles: dict = field(default_factory=dict)
    master_seed: int = 1
    # not settable from scenario files
    bitrate: float = 2.0e6
    mac: MacParams = MacParams()
    cluster: ClusterParams = ClusterParams()
    aodv: AodvParams = AodvParams()
    snapshot_interval: float = 10.0

    def __post_init__(self):
        validate(self)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def file_items(self) -> dict:
        """The configuration as scenario-file keys (values as strings)."""
        return dict(_to_items(self))


def default_flow(src, dst, sim_time=300.0, **kw) -> CbrFlow:
    kw.setdefault("end", sim_time - 5.0)
    return CbrFlow(src, dst, **kw)


def validate(cfg: ScenarioConfig):
    def bad(key, msg):
        raise ScenarioError(f"{key}: {msg}")

    w, h = cfg.terrain
    if not (w > 0 and h > 0):
        bad("terrain", f"width and height must be > 0, got {w}x{h}")
    if cfg.node_count < 1:
        bad("node_count", "must be >= 1")
    if cfg.speed_min < 0:
        bad("speed_min", "must be >= 0")
    if cfg.speed_max < max(cfg.speed_min, MIN_EFFECTIVE_SPEED):
        bad("speed_max", f"must be >= max(speed_min, {MIN_EFFECTIVE_SPEED})")
    if cfg.pause_time < 0:
        bad("pause_time", "must be >= 0")
    if cfg.mobility_start < 0:
        bad("mobility_start", "must be >= 0")
    if cfg.sim_time <= 0:
        bad("sim_time", "must be > 0")
    if cfg.tx_range <= 0:
        bad("tx_range", "must be > 0")
    if cfg.mode not in MODES:
        bad("mode", f"must be one of {', '.join(MODES)}")
    if cfg.flooding not in (FULL, BACKBONE):
        bad("flooding", "must be 'full' or 'backbone'")
    ids = range(1, cfg.node_count + 1)
    for i, f in enumerate(cfg.flows):
        for k in ("src", "dst"):
            if getattr(f, k) not in ids:
                bad(f"flow.{i}.{k}", f"node {getattr(f, k)} outside 1..{cfg.node_count}")
        if f.end > cfg.sim_time:
            bad(f"flow.{i}.end", f"{f.end} exceeds sim_time {cfg.sim_time}")
    for node, pin in cfg.pinned_roles.items():
        if node not in ids:
            bad(f"pinned.{node}", f"node outside 1..{cfg.node_count}")
        if pin.role not in ALLOWED_ROLES[cfg.mode]:
            bad(f"pinned.{node}", f"role {pin.role} not allowed in mode {cfg.mode}")
        if pin.cluster is not None:
            head = cfg.pinned_roles.get(pin.cluster)
            if head is None or head.role not in HEAD_ROLES:
                bad(f"pinned.{node}", f"cluster {pin.cluster} is not a pinned head")


# -- file format ---------------------------------------------------------------

_SCALARS = {
    "node_count": int,
    "speed_min": float,
    "speed_max": float,
    "pause_time": float,
    "mobility_start": float,
    "sim_time": float,
    "tx_range": float,
    "mode": str,
    "flooding": str,
    "master_seed": int,
}
_FLOW_FIELDS = {"src": int, "dst": int, "rate": float, "payload": int, "start": float, "end": float}
_FLOW_KEY = re.compile(r"^flow\.(\d+)\.(\w+)$")
_PIN_KEY = re.compile(r"^pinned\.(\d+)$")


def _convert(conv, raw, where):
    try:
        return conv(raw)
    except ValueError:
        raise ScenarioError(f"{where}: cannot parse {raw!r} as {conv.__name__}") from None


def parse_scenario(text: str, source: str = "<scenario>") -> ScenarioConfig:
    values, flows, pins = {}, {}, {}
    seen = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        where = f"{source}:{lineno}"
        if "=" not in body:
            raise ScenarioError(f"{where}: expected key=value, got {body!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if key in seen:
            raise ScenarioError(f"{where}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        where = f"{where}: {key}"
        if key == "terrain":
            m = re.fullmatch(r"([\d.]+)\s*[xX]\s*([\d.]+)", raw)
            if not m:
                raise ScenarioError(f"{where}: expected WIDTHxHEIGHT, got {raw!r}")
            values["terrain"] = (float(m.group(1)), float(m.group(2)))
        elif key in _SCALARS:
            values[key] = _convert(_SCALARS[key], raw, where)
        elif (m := _FLOW_KEY.match(key)):
            idx, fld = int(m.group(1)), m.group(2)
            if fld not in _FLOW_FIELDS:
                raise ScenarioError(f"{where}: unknown flow field {fld!r}")
            flows.setdefault(idx, {})[fld] = (_convert(_FLOW_FIELDS[fld], raw, where), lineno)
        elif (m := _PIN_KEY.match(key)):
            role_name, _, cluster = raw.partition("@")
            try:
                role = Role(role_name.strip())
            except ValueError:
                names = ", ".join(r.value for r in Role)
                raise ScenarioError(f"{where}: unknown role {role_name!r} (one of {names})") from None
            cl = _convert(int, cluster, where) if cluster else None
            pins[int(m.group(1))] = PinnedRole(role, cl)
        else:
            raise ScenarioError(f"{where}: unknown key")

    sim_time = values.get("sim_time", ScenarioConfig.sim_time)
    flow_list = []
    for idx in sorted(flows):
        spec = {k: v for k, (v, _) in flows[idx].items()}
        for req in ("src", "dst"):
            if req not in spec:
                raise ScenarioError(f"{source}: flow.{idx}.{req}: missing")
        try:
            flow_list.append(default_flow(spec.pop("src"), spec.pop("dst"), sim_time, **spec))
        except ValueError as e:
            line = min(l for _, l in flows[idx].values())
            raise ScenarioError(f"{source}:{line}: flow.{idx}: {e}") from None
    try:
        return ScenarioConfig(flows=tuple(flow_list), pinned_roles=pins, **values)
    except ScenarioError as e:
        key = str(e).split(":", 1)[0]
        line = seen.get(key) or seen.get(key.split(".", 1)[0])
        loc = f"{source}:{line}" if line else source
        raise ScenarioError(f"{loc}: {e}") from None


def load_scenario(path) -> ScenarioConfig:
    p = Path(path)
    if not p.exists():
        bundled = resources.files("manetsim.scenarios").joinpath(str(path))
        if bundled.is_file():
            return parse_scenario(bundled.read_text(encoding="utf-8"), str(path))
        raise ScenarioError(f"{path}: scenario file not found")
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ScenarioError(f"{path}: not UTF-8 ({e})") from None
    return parse_scenario(text, str(path))


def bundled_scenario(name: str) -> ScenarioConfig:
    text = resources.files("manetsim.scenarios").joinpath(name).read_text(encoding="utf-8")
    return parse_scenario(text, name)


def _fmt(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v)) if abs(v) < 1e15 else repr(v)
    return str(v)


def _to_items(cfg: ScenarioConfig):
    w, h = cfg.terrain
    yield "terrain", f"{_fmt(w)}x{_fmt(h)}"
    for key in _SCALARS:
        yield key, _fmt(getattr(cfg, key))
    for i, f in enumerate(cfg.flows):
        for k in _FLOW_FIELDS:
            yield f"flow.{i}.{k}", _fmt(getattr(f, k))
    for node in sorted(cfg.pinned_roles):
        pin = cfg.pinned_roles[node]
        yield f"pinned.{node}", pin.role.value + (f"@{pin.cluster}" if pin.cluster is not None else "")


def dump_scenario(cfg: ScenarioConfig) -> str:
    return "".join(f"{k}={v}\n" for k, v in _to_items(cfg))
