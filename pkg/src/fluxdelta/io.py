"""Run configuration parsing and table serialization.

Configurations are YAML documents (comments allowed) with a mandatory
``schema_version``. Unknown keys are rejected with the path of the offending
field. Tables are written either as CSV (comma separated, header row, LF line
endings, floats with 17 significant digits) or as a versioned JSON document.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import yaml

from .atom import DEFAULT_DT, DEFAULT_OMEGA0, PulseSchedule, PulseSpec
from .circuit import DEFAULT_CUTOFF, CircuitParams
from .dynamics import DEFAULT_TOLERANCE
from .errors import ConfigurationError
from .transitions import DEFAULT_THRESHOLD

SCHEMA_VERSION = 1
COMMANDS = ("spectrum", "transitions", "adiabatic", "propagate", "phase-sweep")

_PI_EXPR = re.compile(r"^\s*([+-])?\s*(\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_number(value, path):
    """Float from a YAML scalar; strings like ``pi``, ``-pi/2``, ``3*pi/4`` are accepted."""
    if isinstance(value, bool):
        raise ConfigurationError(f"expected a number, got {value!r}", path)
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        m = _PI_EXPR.match(value)
        if m is None:
            try:
                out = float(value)
            except ValueError:
                raise ConfigurationError(f"expected a number, got {value!r}", path) from None
        else:
            sign, mult, div = m.groups()
            out = (float(mult) if mult else 1.0) * math.pi / (float(div) if div else 1.0)
            if sign == "-":
                out = -out
    else:
        raise ConfigurationError(f"expected a number, got {value!r}", path)
    if math.isnan(out):
        raise ConfigurationError("NaN is not allowed", path)
    return out


class _Section:
    """Typed accessor over one mapping that remembers which keys were read."""

    def __init__(self, data, path):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigurationError("expected a mapping", path or "<root>")
        self.data = data
        self.path = path
        self.seen = set()

    def _p(self, key):
        return f"{self.path}.{key}" if self.path else key

    def has(self, key):
        return key in self.data

    def raw(self, key, default=None):
        self.seen.add(key)
        return self.data.get(key, default)

    def number(self, key, default=None, *, positive=False, finite=True):
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigurationError("missing required field", self._p(key))
            return float(default)
        value = parse_number(self.data[key], self._p(key))
        if finite and not math.isfinite(value):
            raise ConfigurationError("must be finite", self._p(key))
        if positive and not value > 0:
            raise ConfigurationError("must be positive", self._p(key))
        return value

    def integer(self, key, default=None, *, minimum=None):
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigurationError("missing required field", self._p(key))
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"expected an integer, got {value!r}", self._p(key))
        if minimum is not None and value < minimum:
            raise ConfigurationError(f"must be >= {minimum}", self._p(key))
        return value

    def string(self, key, default=None, choices=None):
        self.seen.add(key)
        value = self.data.get(key, default)
        if value is None:
            raise ConfigurationError("missing required field", self._p(key))
        if not isinstance(value, str):
            raise ConfigurationError(f"expected a string, got {value!r}", self._p(key))
        if choices is not None and value not in choices:
            raise ConfigurationError(f"must be one of {list(choices)}, got {value!r}", self._p(key))
        return value

    def numbers(self, key, default=None, length=None):
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigurationError("missing required field", self._p(key))
            return [float(x) for x in default]
        values = self.data[key]
        if not isinstance(values, list) or not values:
            raise ConfigurationError("expected a non-empty list", self._p(key))
        if length is not None and len(values) != length:
            raise ConfigurationError(f"expected {length} entries", self._p(key))
        return [parse_number(v, f"{self._p(key)}[{i}]") for i, v in enumerate(values)]

    def section(self, key, required=True):
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ConfigurationError("missing required section", self._p(key))
            return None
        return _Section(self.data[key], self._p(key))

    def finish(self):
        unknown = sorted(set(self.data) - self.seen, key=str)
        if unknown:
            raise ConfigurationError("unknown key", self._p(unknown[0]))


def _grid(sec: _Section) -> np.ndarray:
    """A grid is either ``values: [...]`` or ``start/stop/num`` (inclusive linspace)."""
    if sec.has("values"):
        out = np.array(sec.numbers("values"))
    else:
        start = sec.number("start")
        stop = sec.number("stop")
        num = sec.integer("num", minimum=1)
        out = np.linspace(start, stop, num)
    sec.finish()
    return out


def _circuit(sec: _Section) -> CircuitParams:
    alpha = sec.number("alpha", 0.8)
    ratio = sec.number("ej_over_ec", 40.0)
    cutoff = sec.integer("cutoff", DEFAULT_CUTOFF, minimum=1)
    sec.finish()
    try:
        return CircuitParams(alpha=alpha, ej_over_ec=ratio, f=0.5, cutoff=cutoff)
    except ConfigurationError as exc:
        raise ConfigurationError(str(exc).split(": ", 1)[-1], f"{sec.path}.{exc.path}") from None


def _pulse(sec: _Section) -> PulseSpec:
    spec = dict(
        amplitude_factor=sec.number("amplitude", positive=False),
        phase=sec.number("phase", 0.0),
        center=sec.number("center"),
        width=sec.number("width", 1.0, finite=False),
    )
    sec.finish()
    if spec["amplitude_factor"] < 0:
        raise ConfigurationError("must be >= 0", f"{sec.path}.amplitude")
    try:
        return PulseSpec(**spec)
    except ConfigurationError as exc:
        raise ConfigurationError(str(exc).split(": ", 1)[-1], f"{sec.path}.{exc.path}") from None


def _schedule(sec: _Section) -> PulseSchedule:
    pulses = [_pulse(sec.section(f"pulse_{name}")) for name in ("10", "21", "20")]
    omega0 = sec.number("omega0", DEFAULT_OMEGA0, positive=True)
    detunings = tuple(sec.numbers("detunings", (0.0, 0.0, 0.0), length=3))
    total_phase = sec.number("total_phase") if sec.has("total_phase") else None
    sec.finish()
    s = PulseSchedule(*pulses, omega0=omega0, detunings=detunings)
    if total_phase is not None:
        s = s.with_total_phase(total_phase)
    return s


def schedule_to_mapping(s: PulseSchedule) -> dict:
    """The ``schedule`` block that parses back into ``s`` exactly."""

    def pulse(p: PulseSpec):
        return {"amplitude": p.amplitude_factor, "phase": p.phase, "center": p.center, "width": p.width}

    return {
        "omega0": s.omega0,
        "detunings": list(s.detunings),
        "pulse_10": pulse(s.pulse_10),
        "pulse_21": pulse(s.pulse_21),
        "pulse_20": pulse(s.pulse_20),
    }


def parse_schedule(raw: Any, path: str = "schedule") -> PulseSchedule:
    return _schedule(_Section(raw, path))


def _state(values, path) -> np.ndarray:
    if not isinstance(values, list) or len(values) != 3:
        raise ConfigurationError("expected three amplitudes", path)
    out = []
    for i, v in enumerate(values):
        if isinstance(v, list):
            if len(v) != 2:
                raise ConfigurationError("complex amplitude must be [re, im]", f"{path}[{i}]")
            out.append(complex(parse_number(v[0], f"{path}[{i}]"), parse_number(v[1], f"{path}[{i}]")))
        else:
            out.append(complex(parse_number(v, f"{path}[{i}]")))
    psi = np.array(out)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ConfigurationError("initial state must be normalized", path)
    return psi


@dataclass
class RunConfig:
    command: str
    description: str = ""
    circuit: CircuitParams | None = None
    flux: np.ndarray | None = None
    levels: int = 6
    threshold: float = DEFAULT_THRESHOLD
    schedule: PulseSchedule | None = None
    times: np.ndarray | None = None
    phases: np.ndarray | None = None
    dt: float = DEFAULT_DT
    tolerance: float = DEFAULT_TOLERANCE
    initial: np.ndarray = field(default_factory=lambda: np.array([1, 0, 0], dtype=complex))
    level: int = 3
    seed: int = 0


def parse_config(raw: Any, command: str | None = None) -> RunConfig:
    """Validate a decoded configuration mapping into a ``RunConfig``."""
    root = _Section(raw, "")
    version = root.integer("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported schema version {version}", "schema_version")
    cmd = root.string("command", command, COMMANDS)
    if command is not None and cmd != command:
        raise ConfigurationError(f"config is for {cmd!r}, not {command!r}", "command")
    cfg = RunConfig(command=cmd)
    cfg.description = root.string("description", "")
    cfg.seed = root.integer("seed", 0)

    if cmd in ("spectrum", "transitions"):
        cfg.circuit = _circuit(root.section("circuit"))
        cfg.flux = _grid(root.section("flux"))
        if np.any((cfg.flux < 0) | (cfg.flux > 1)):
            raise ConfigurationError("flux values must lie in [0, 1]", "flux")
        if cmd == "spectrum":
            cfg.levels = root.integer("levels", 6, minimum=4)
        else:
            cfg.threshold = root.number("threshold", DEFAULT_THRESHOLD, positive=True)
    else:
        cfg.schedule = _schedule(root.section("schedule"))

    if cmd == "adiabatic":
        cfg.times = _grid(root.section("time"))
        cfg.phases = _grid(root.section("phase")) if root.has("phase") else None
        cfg.dt = root.number("dt", DEFAULT_DT, positive=True)
    elif cmd == "propagate":
        cfg.times = _grid(root.section("time"))
        if cfg.times.size < 2:
            raise ConfigurationError("need at least two time points", "time")
        cfg.tolerance = root.number("tolerance", DEFAULT_TOLERANCE, positive=True)
        if root.has("initial"):
            cfg.initial = _state(root.raw("initial"), "initial")
    elif cmd == "phase-sweep":
        cfg.times = _grid(root.section("time"))
        cfg.phases = _grid(root.section("phase"))
        if np.any(np.abs(cfg.phases) > np.pi + 1e-12):
            raise ConfigurationError("phases must lie in [-pi, pi]", "phase")
        cfg.level = root.integer("level", 3, minimum=1)
        if cfg.level > 3:
            raise ConfigurationError("must be 1, 2 or 3", "level")
    root.finish()
    return cfg


def load_config(source: str | Path, command: str | None = None) -> RunConfig:
    """Read and validate a YAML configuration file."""
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}", "--config") from None
    return parse_config_text(text, command)


def parse_config_text(text: str, command: str | None = None) -> RunConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed YAML: {exc}", "<root>") from None
    return parse_config(raw, command)


# -- presets ---------------------------------------------------------------


def _preset_dir():
    return resources.files("fluxdelta") / "presets"


def preset_names() -> list[str]:
    return sorted(p.name[: -len(".yaml")] for p in _preset_dir().iterdir() if p.name.endswith(".yaml"))


def preset_text(name: str) -> str:
    entry = _preset_dir() / f"{name}.yaml"
    if not entry.is_file():
        raise ConfigurationError(f"unknown preset {name!r}; available: {preset_names()}", "--preset")
    return entry.read_text(encoding="utf-8")


def load_preset(name: str, command: str | None = None) -> RunConfig:
    return parse_config_text(preset_text(name), command)


# -- tables ----------------------------------------------------------------


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format_float(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, str):
        return value
    x = float(value)
    return None if not math.isfinite(x) else x


def render_table(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    fmt: str = "csv",
    *,
    command: str = "",
    meta: dict | None = None,
) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "meta": meta or {},
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    raise ConfigurationError(f"unknown format {fmt!r}", "--format")


def parse_table(text: str, fmt: str = "csv") -> tuple[list[str], list[list[Any]]]:
    """Inverse of ``render_table``: (columns, rows) with floats restored."""
    if fmt == "json":
        doc = json.loads(text)
        rows = [[float("nan") if v is None else v for v in row] for row in doc["rows"]]
        return doc["columns"], rows
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = []
    for raw in reader:
        row = []
        for v in raw:
            try:
                row.append(float(v))
            except ValueError:
                row.append(v)
        rows.append(row)
    return columns, rows
